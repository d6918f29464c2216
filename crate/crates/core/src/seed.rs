//! Hierarchical seed derivation: master seed -> (stage, indices) streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Deterministic child seed for `stage` and a path of indices.
pub fn derive_seed(master: u64, stage: &str, path: &[u64]) -> u64 {
    let mut h = splitmix64(master ^ fnv1a(stage));
    for &i in path {
        h = splitmix64(h ^ splitmix64(i));
    }
    h
}

pub fn stream(master: u64, stage: &str, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, stage, path))
}
