//! Pauli strings, weight-bounded observable families and exact expectation values.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, CsstError, Result};
use crate::state::DensityMatrix;

/// Maximum number of sites a packed word can hold.
pub const MAX_QUBITS: usize = 32;

/// Default qubit cap for building dense Pauli matrices.
pub const DEFAULT_MATRIX_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Letter {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Letter {
    pub const NON_IDENTITY: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    fn from_code(code: u64) -> Letter {
        match code & 3 {
            0 => Letter::I,
            1 => Letter::X,
            2 => Letter::Y,
            _ => Letter::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    /// 2x2 matrix in the computational basis.
    pub fn matrix(self) -> Array2<Complex64> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let data = match self {
            Letter::I => [l, o, o, l],
            Letter::X => [o, l, l, o],
            Letter::Y => [o, -i, i, o],
            Letter::Z => [l, o, o, -l],
        };
        Array2::from_shape_vec((2, 2), data.to_vec()).expect("2x2")
    }
}

/// Tensor product of single-site Paulis, packed two bits per site.
///
/// Site 0 is the leftmost letter of the ASCII word and the most significant
/// bit of computational basis indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    weight: u8,
    codes: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        Self::from_letters(&vec![Letter::I; n])
    }

    pub fn from_letters(letters: &[Letter]) -> Result<Self> {
        if letters.is_empty() || letters.len() > MAX_QUBITS {
            return Err(invalid!(
                "Pauli string length {} outside 1..={MAX_QUBITS}",
                letters.len()
            ));
        }
        let mut codes = 0u64;
        let mut weight = 0u8;
        for (site, &l) in letters.iter().enumerate() {
            codes |= (l as u64) << (2 * site);
            if l != Letter::I {
                weight += 1;
            }
        }
        Ok(PauliString {
            n: letters.len() as u8,
            weight,
            codes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    pub fn weight(&self) -> usize {
        self.weight as usize
    }

    pub fn letter(&self, site: usize) -> Letter {
        debug_assert!(site < self.num_qubits());
        Letter::from_code(self.codes >> (2 * site))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.num_qubits()).map(move |q| self.letter(q))
    }

    /// Packed 2-bit codes, site `q` at bits `2q..2q+2`.
    pub fn codes(&self) -> u64 {
        self.codes
    }

    /// Computational-index mask of sites carrying X or Y (bit flips).
    pub fn flip_mask(&self) -> usize {
        self.index_mask(|l| matches!(l, Letter::X | Letter::Y))
    }

    /// Computational-index mask of sites carrying Y or Z (phase flips).
    pub fn phase_mask(&self) -> usize {
        self.index_mask(|l| matches!(l, Letter::Y | Letter::Z))
    }

    /// Computational-index mask of the support.
    pub fn support_mask(&self) -> usize {
        self.index_mask(|l| l != Letter::I)
    }

    fn index_mask(&self, pred: impl Fn(Letter) -> bool) -> usize {
        let n = self.num_qubits();
        self.letters()
            .enumerate()
            .filter(|&(_, l)| pred(l))
            .fold(0usize, |acc, (q, _)| acc | (1 << (n - 1 - q)))
    }

    fn count_y(&self) -> usize {
        self.letters().filter(|&l| l == Letter::Y).count()
    }
}

/// Number of non-identity letters.
pub fn weight(p: &PauliString) -> usize {
    p.weight()
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.letters().map(Letter::as_char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = CsstError;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| CsstError::Parse(format!("bad Pauli letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_letters(&letters)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Closed-form size of the family enumerated by [`enumerate_paulis`].
pub fn family_size(n: usize, w_max: usize) -> u128 {
    (1..=w_max.min(n))
        .map(|k| binomial(n, k) * 3u128.pow(k as u32))
        .sum()
}

/// All Pauli strings on `n` qubits with weight in `1..=w_max`.
///
/// Ordered by ascending weight; within a weight sector supports are visited in
/// lexicographic site order and letters run X<Y<Z with the leftmost site slowest.
pub fn enumerate_paulis(n: usize, w_max: usize) -> Result<Vec<PauliString>> {
    if n == 0 || n > MAX_QUBITS {
        return Err(invalid!("qubit count {n} outside 1..={MAX_QUBITS}"));
    }
    if w_max < 1 || w_max > n {
        return Err(invalid!("max weight {w_max} outside 1..={n}"));
    }
    let mut out = Vec::with_capacity(family_size(n, w_max) as usize);
    let mut letters = vec![Letter::I; n];
    for w in 1..=w_max {
        let mut support: Vec<usize> = (0..w).collect();
        loop {
            // odometer over {X,Y,Z}^w, leftmost site slowest
            let mut digits = vec![0usize; w];
            loop {
                for (slot, &q) in support.iter().enumerate() {
                    letters[q] = Letter::NON_IDENTITY[digits[slot]];
                }
                out.push(PauliString::from_letters(&letters)?);
                let mut pos = w;
                while pos > 0 {
                    pos -= 1;
                    digits[pos] += 1;
                    if digits[pos] < 3 {
                        break;
                    }
                    digits[pos] = 0;
                    if pos == 0 {
                        pos = usize::MAX;
                        break;
                    }
                }
                if pos == usize::MAX {
                    break;
                }
            }
            for &q in &support {
                letters[q] = Letter::I;
            }
            if !next_combination(&mut support, n) {
                break;
            }
        }
    }
    Ok(out)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Dense matrix of `p`, refusing strings longer than [`DEFAULT_MATRIX_CAP`].
pub fn pauli_matrix(p: &PauliString) -> Result<Array2<Complex64>> {
    pauli_matrix_capped(p, DEFAULT_MATRIX_CAP)
}

pub fn pauli_matrix_capped(p: &PauliString, max_qubits: usize) -> Result<Array2<Complex64>> {
    let n = p.num_qubits();
    if n > max_qubits {
        return Err(CsstError::ResourceLimit(format!(
            "dense Pauli matrix on {n} qubits exceeds cap {max_qubits}"
        )));
    }
    let d = 1usize << n;
    let flip = p.flip_mask();
    let phase_mask = p.phase_mask();
    let global = i_pow(p.count_y());
    let mut m = Array2::zeros((d, d));
    for x in 0..d {
        let sign = if (x & phase_mask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m[[x ^ flip, x]] = global * sign;
    }
    Ok(m)
}

fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `Tr(P rho)` without forming `P`; the full complex trace.
pub fn trace_with(p: &PauliString, rho: &Array2<Complex64>) -> Complex64 {
    let flip = p.flip_mask();
    let phase_mask = p.phase_mask();
    let mut acc = Complex64::new(0.0, 0.0);
    for x in 0..rho.nrows() {
        let v = rho[[x, x ^ flip]];
        if (x & phase_mask).count_ones() % 2 == 1 {
            acc -= v;
        } else {
            acc += v;
        }
    }
    i_pow(p.count_y()) * acc
}

/// Real expectation value `Tr(P rho)`.
pub fn expectation(p: &PauliString, rho: &DensityMatrix) -> Result<f64> {
    if p.num_qubits() != rho.num_qubits() {
        return Err(invalid!(
            "Pauli on {} qubits against state on {} qubits",
            p.num_qubits(),
            rho.num_qubits()
        ));
    }
    let tr = trace_with(p, rho.matrix());
    if tr.im.abs() > 1e-9 {
        return Err(CsstError::Numerical(format!(
            "expectation of Hermitian {p} has imaginary part {:.3e}",
            tr.im
        )));
    }
    Ok(tr.re)
}
