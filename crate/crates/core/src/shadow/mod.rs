//! Local (random Pauli basis) classical shadows: Born-rule sampling from
//! exact states and the product-form Pauli estimators.

pub(crate) mod budget;

pub use budget::{baseline_budget, bernstein_epsilon, bernstein_shots, mom_shots, ShotBudget};

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, CsstError, Result};
use crate::pauli::{trace_with, Letter, PauliString};
use crate::seed;
use crate::state::DensityMatrix;

/// Largest qubit count for the all-Pauli moment table (6^n histogram cells).
pub const MOMENT_TABLE_CAP: usize = 8;

/// One randomized measurement: basis letters in {X,Y,Z} and outcome bits,
/// site `q` at code bits `2q..2q+2` and outcome bit `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Snapshot {
    pub bases: u64,
    pub outcome: u64,
}

impl Snapshot {
    pub fn basis(&self, site: usize) -> Letter {
        match (self.bases >> (2 * site)) & 3 {
            1 => Letter::X,
            2 => Letter::Y,
            _ => Letter::Z,
        }
    }

    pub fn bit(&self, site: usize) -> u8 {
        ((self.outcome >> site) & 1) as u8
    }

    pub fn format(&self, n: usize) -> String {
        let mut s = String::with_capacity(2 * n + 1);
        for q in 0..n {
            s.push(self.basis(q).as_char());
        }
        s.push(',');
        for q in 0..n {
            s.push(if self.bit(q) == 1 { '1' } else { '0' });
        }
        s
    }

    pub fn parse(line: &str) -> Result<(usize, Snapshot)> {
        let (b, o) = line
            .split_once(',')
            .ok_or_else(|| CsstError::Parse(format!("snapshot line {line:?} lacks a comma")))?;
        if b.len() != o.len() || b.is_empty() || b.len() > crate::pauli::MAX_QUBITS {
            return Err(CsstError::Parse(format!("snapshot line {line:?} has mismatched lengths")));
        }
        let mut snap = Snapshot { bases: 0, outcome: 0 };
        for (q, (bc, oc)) in b.chars().zip(o.chars()).enumerate() {
            let code = match bc {
                'X' => 1,
                'Y' => 2,
                'Z' => 3,
                _ => return Err(CsstError::Parse(format!("bad basis letter {bc:?}"))),
            };
            snap.bases |= code << (2 * q);
            match oc {
                '0' => {}
                '1' => snap.outcome |= 1 << q,
                _ => return Err(CsstError::Parse(format!("bad outcome bit {oc:?}"))),
            }
        }
        Ok((b.len(), snap))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShadowDataset {
    pub n: usize,
    pub timestep: usize,
    pub seed: u64,
    pub snapshots: Vec<Snapshot>,
}

impl ShadowDataset {
    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Text form: `#` header comments, then one `BASES,BITS` line per snapshot.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * (2 * self.n + 2) + 64);
        let _ = writeln!(out, "# timestep={}", self.timestep);
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# shots={}", self.len());
        for s in &self.snapshots {
            out.push_str(&s.format(self.n));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (mut timestep, mut seed, mut shots) = (None, None, None);
        let mut n = None;
        let mut snapshots = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.trim().split_once('=') {
                    let v: u64 = v
                        .trim()
                        .parse()
                        .map_err(|_| CsstError::Parse(format!("bad header value in {line:?}")))?;
                    match k.trim() {
                        "timestep" => timestep = Some(v as usize),
                        "seed" => seed = Some(v),
                        "shots" => shots = Some(v as usize),
                        _ => {}
                    }
                }
                continue;
            }
            let (len, snap) = Snapshot::parse(line)?;
            if *n.get_or_insert(len) != len {
                return Err(CsstError::Parse("snapshots of differing lengths".into()));
            }
            snapshots.push(snap);
        }
        let missing = |k: &str| CsstError::Parse(format!("dataset header lacks {k}"));
        let ds = ShadowDataset {
            n: n.ok_or_else(|| CsstError::Parse("dataset has no snapshots".into()))?,
            timestep: timestep.ok_or_else(|| missing("timestep"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            snapshots,
        };
        if shots.ok_or_else(|| missing("shots"))? != ds.len() {
            return Err(CsstError::Parse("shot count header disagrees with records".into()));
        }
        Ok(ds)
    }
}

/// Born distribution of `rho` measured in the product basis `bases`,
/// indexed by computational outcome (site 0 most significant).
pub fn born_distribution(rho: &DensityMatrix, bases: u64) -> Result<Vec<f64>> {
    let n = rho.num_qubits();
    let d = rho.dim();
    // E_S = <P_S>, P_S carrying the basis letter on the subset S
    let mut table = vec![0.0f64; d];
    let mut letters = vec![Letter::I; n];
    for (subset, slot) in table.iter_mut().enumerate() {
        for (q, l) in letters.iter_mut().enumerate() {
            *l = if (subset >> (n - 1 - q)) & 1 == 1 {
                Snapshot { bases, outcome: 0 }.basis(q)
            } else {
                Letter::I
            };
        }
        let p = PauliString::from_letters(&letters)?;
        *slot = trace_with(&p, rho.matrix()).re;
    }
    walsh_hadamard(&mut table);
    for v in table.iter_mut() {
        *v /= d as f64;
        if !(-1e-9..=1.0 + 1e-9).contains(v) {
            return Err(CsstError::Numerical(format!("Born probability {v} out of range")));
        }
        *v = v.clamp(0.0, 1.0);
    }
    Ok(table)
}

fn walsh_hadamard(v: &mut [f64]) {
    let mut h = 1;
    while h < v.len() {
        for i in (0..v.len()).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Samples snapshots of one state, caching the Born distribution per basis word.
pub struct ShadowSampler<'a> {
    rho: &'a DensityMatrix,
    cdfs: HashMap<u64, Vec<f64>>,
}

impl<'a> ShadowSampler<'a> {
    pub fn new(rho: &'a DensityMatrix) -> Self {
        ShadowSampler {
            rho,
            cdfs: HashMap::new(),
        }
    }

    pub fn draw(&mut self, rng: &mut ChaCha8Rng) -> Result<Snapshot> {
        let n = self.rho.num_qubits();
        let mut bases = 0u64;
        for q in 0..n {
            bases |= (rng.random_range(0..3u64) + 1) << (2 * q);
        }
        if !self.cdfs.contains_key(&bases) {
            let probs = born_distribution(self.rho, bases)?;
            let mut acc = 0.0;
            let cdf: Vec<f64> = probs
                .iter()
                .map(|p| {
                    acc += p;
                    acc
                })
                .collect();
            self.cdfs.insert(bases, cdf);
        }
        let cdf = &self.cdfs[&bases];
        let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
        let x = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        let mut outcome = 0u64;
        for q in 0..n {
            outcome |= (((x >> (n - 1 - q)) & 1) as u64) << q;
        }
        Ok(Snapshot { bases, outcome })
    }
}

/// `n_shots` independent snapshots of `rho`, reproducible from `seed`.
pub fn sample_snapshots(rho: &DensityMatrix, n_shots: usize, seed: u64) -> Result<ShadowDataset> {
    sample_snapshots_at(rho, n_shots, seed, 0)
}

/// As [`sample_snapshots`], drawing from the `(seed, timestep)` stream.
pub fn sample_snapshots_at(rho: &DensityMatrix, n_shots: usize, seed: u64, timestep: usize) -> Result<ShadowDataset> {
    if n_shots < 1 {
        return Err(invalid!("need at least one shot"));
    }
    let mut rng = seed::stream(seed, "shadows", &[timestep as u64]);
    let mut sampler = ShadowSampler::new(rho);
    let snapshots = (0..n_shots).map(|_| sampler.draw(&mut rng)).collect::<Result<Vec<_>>>()?;
    Ok(ShadowDataset {
        n: rho.num_qubits(),
        timestep,
        seed,
        snapshots,
    })
}

/// Product estimator: 1 on identity sites, `3 (-1)^b` on matching sites, 0 otherwise.
pub fn single_shot_value(snap: &Snapshot, p: &PauliString) -> f64 {
    let codes = p.codes();
    // 0b11 on every non-identity field
    let field = (codes | (codes >> 1)) & 0x5555_5555_5555_5555;
    let support2 = field | (field << 1);
    if (snap.bases ^ codes) & support2 != 0 {
        return 0.0;
    }
    let sites = compress_even_bits(field);
    let magnitude = 3f64.powi(p.weight() as i32);
    if (snap.outcome & sites).count_ones() % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

// bit 2q -> bit q
fn compress_even_bits(x: u64) -> u64 {
    let mut out = 0u64;
    let mut v = x;
    while v != 0 {
        let b = v.trailing_zeros();
        out |= 1 << (b / 2);
        v &= v - 1;
    }
    out
}

fn check_compatible(ds: &ShadowDataset, p: &PauliString) -> Result<()> {
    if ds.is_empty() {
        return Err(invalid!("empty shadow dataset"));
    }
    if ds.n != p.num_qubits() {
        return Err(invalid!("dataset on {} qubits, Pauli on {}", ds.n, p.num_qubits()));
    }
    Ok(())
}

/// Sample mean of the single-shot values.
pub fn estimate_pauli(ds: &ShadowDataset, p: &PauliString) -> Result<f64> {
    check_compatible(ds, p)?;
    let sum: f64 = ds.snapshots.iter().map(|s| single_shot_value(s, p)).sum();
    Ok(sum / ds.len() as f64)
}

/// Median of `k_batches` contiguous batch means; trailing remainder dropped.
pub fn estimate_pauli_mom(ds: &ShadowDataset, p: &PauliString, k_batches: usize) -> Result<f64> {
    check_compatible(ds, p)?;
    if k_batches < 1 || ds.len() < k_batches {
        return Err(invalid!("{} snapshots cannot form {k_batches} batches", ds.len()));
    }
    let size = ds.len() / k_batches;
    let mut means: Vec<f64> = ds.snapshots[..size * k_batches]
        .chunks_exact(size)
        .map(|b| b.iter().map(|s| single_shot_value(s, p)).sum::<f64>() / size as f64)
        .collect();
    means.sort_by(|a, b| a.total_cmp(b));
    let mid = means.len() / 2;
    Ok(if means.len() % 2 == 1 {
        means[mid]
    } else {
        0.5 * (means[mid - 1] + means[mid])
    })
}

/// Signed match counts for every Pauli string of a dataset at once.
///
/// Built from the (basis, bit) histogram by a per-site 6 -> 4 contraction,
/// so the cost is independent of the number of observables queried.
#[derive(Debug, Clone)]
pub struct PauliMoments {
    n: usize,
    shots: usize,
    sums: Vec<i64>,
}

impl PauliMoments {
    pub fn from_dataset(ds: &ShadowDataset) -> Result<Self> {
        let n = ds.n;
        if n > MOMENT_TABLE_CAP {
            return Err(CsstError::ResourceLimit(format!(
                "moment table on {n} qubits exceeds cap {MOMENT_TABLE_CAP}"
            )));
        }
        if ds.is_empty() {
            return Err(invalid!("empty shadow dataset"));
        }
        let mut data = vec![0i64; 6usize.pow(n as u32)];
        for s in &ds.snapshots {
            let mut idx = 0usize;
            let mut stride = 1usize;
            for q in 0..n {
                let code = ((s.bases >> (2 * q)) & 3) as usize;
                idx += stride * (2 * (code - 1) + s.bit(q) as usize);
                stride *= 6;
            }
            data[idx] += 1;
        }
        for q in 0..n {
            let low = 4usize.pow(q as u32);
            let high = 6usize.pow((n - q - 1) as u32);
            let mut next = vec![0i64; low * 4 * high];
            for h in 0..high {
                for l in 0..low {
                    let at = |s: usize| data[l + low * (s + 6 * h)];
                    let out = |a: usize| l + low * (a + 4 * h);
                    next[out(0)] = (0..6).map(at).sum();
                    for letter in 1..4 {
                        next[out(letter)] = at(2 * (letter - 1)) - at(2 * (letter - 1) + 1);
                    }
                }
            }
            data = next;
        }
        Ok(PauliMoments {
            n,
            shots: ds.len(),
            sums: data,
        })
    }

    pub fn shots(&self) -> usize {
        self.shots
    }

    /// Same value as [`estimate_pauli`] on the source dataset.
    pub fn estimate(&self, p: &PauliString) -> f64 {
        debug_assert_eq!(p.num_qubits(), self.n);
        let sum = self.sums[p.codes() as usize] as f64 * 3f64.powi(p.weight() as i32);
        sum / self.shots as f64
    }
}
