//! Open-system models, the vectorized generator and ground-truth signals.

mod evolve;
pub mod expm;
mod modal;

pub use evolve::{evolve_grid, signal_matrix, vectorize_lindbladian, vectorize_lindbladian_capped, SignalMatrix};
pub use modal::{modal_expansion, ModalBasis, ModalDecomposition, DEFAULT_CONDITION_CAP};

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CsstError, Result};
use crate::pauli::{Letter, PauliString};
use crate::state::{hermiticity_defect, HERMITIAN_TOL};

/// Largest qubit count for which the dense d^2 x d^2 generator is built.
pub const DEFAULT_QUBIT_CAP: usize = 6;

#[derive(Debug, Clone)]
pub struct Jump {
    pub operator: Array2<Complex64>,
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    n: usize,
    hamiltonian: Array2<Complex64>,
    jumps: Vec<Jump>,
}

impl LindbladModel {
    pub fn new(n: usize, hamiltonian: Array2<Complex64>, jumps: Vec<Jump>) -> Result<Self> {
        let d = 1usize << n;
        if hamiltonian.dim() != (d, d) {
            return Err(invalid!("Hamiltonian shape {:?} != ({d}, {d})", hamiltonian.dim()));
        }
        let defect = hermiticity_defect(&hamiltonian);
        if defect > HERMITIAN_TOL {
            return Err(invalid!("Hamiltonian not Hermitian (defect {defect:.3e})"));
        }
        for j in &jumps {
            if j.operator.dim() != (d, d) {
                return Err(invalid!("jump operator shape {:?} != ({d}, {d})", j.operator.dim()));
            }
            if !(j.rate >= 0.0) || !j.rate.is_finite() {
                return Err(invalid!("jump rate {} must be finite and nonnegative", j.rate));
            }
        }
        Ok(LindbladModel { n, hamiltonian, jumps })
    }

    pub fn closed(n: usize, hamiltonian: Array2<Complex64>) -> Result<Self> {
        Self::new(n, hamiltonian, Vec::new())
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn hamiltonian(&self) -> &Array2<Complex64> {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub n_steps: usize,
    pub dt: f64,
}

impl TimeGrid {
    pub fn new(n_steps: usize, dt: f64) -> Result<Self> {
        if n_steps < 1 {
            return Err(invalid!("time grid needs at least one step"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid!("time step {dt} must be positive"));
        }
        Ok(TimeGrid { n_steps, dt })
    }

    /// t_j = j * dt for j = 0..N (the first sample sits at t = 0).
    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_steps).map(|j| self.time(j)).collect()
    }
}

/// Open-boundary rectangular lattice with row-major site numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub rows: usize,
    pub cols: usize,
}

impl Lattice {
    pub fn sites(&self) -> usize {
        self.rows * self.cols
    }

    /// Nearest-neighbour edges, horizontal bonds first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let idx = |r: usize, c: usize| r * self.cols + c;
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols.saturating_sub(1) {
                out.push((idx(r, c), idx(r, c + 1)));
            }
        }
        for r in 0..self.rows.saturating_sub(1) {
            for c in 0..self.cols {
                out.push((idx(r, c), idx(r + 1, c)));
            }
        }
        out
    }

    fn check(&self, cap: usize) -> Result<usize> {
        let n = self.sites();
        if n == 0 {
            return Err(invalid!("empty lattice {}x{}", self.rows, self.cols));
        }
        if n > cap {
            return Err(CsstError::ResourceLimit(format!("{n} sites exceeds qubit cap {cap}")));
        }
        Ok(n)
    }
}

/// Real-weighted sum of Pauli strings.
#[derive(Debug, Clone, Default)]
pub struct PauliSum {
    pub terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn to_matrix(&self, n: usize) -> Array2<Complex64> {
        let d = 1usize << n;
        let mut m = Array2::zeros((d, d));
        for (coef, p) in &self.terms {
            let unit = crate::pauli::pauli_matrix_capped(p, crate::pauli::MAX_QUBITS).expect("capped by lattice");
            m.scaled_add(Complex64::new(*coef, 0.0), &unit);
        }
        m
    }
}

fn two_site(n: usize, a: usize, b: usize, l: Letter) -> PauliString {
    let mut letters = vec![Letter::I; n];
    letters[a] = l;
    letters[b] = l;
    PauliString::from_letters(&letters).expect("valid length")
}

fn one_site(n: usize, a: usize, l: Letter) -> PauliString {
    let mut letters = vec![Letter::I; n];
    letters[a] = l;
    PauliString::from_letters(&letters).expect("valid length")
}

/// J * sum over edges of (XX + YY + ZZ).
pub fn heisenberg_terms(lattice: Lattice, j: f64) -> Result<PauliSum> {
    let n = lattice.check(DEFAULT_QUBIT_CAP)?;
    let mut terms = Vec::new();
    for (a, b) in lattice.edges() {
        for l in Letter::NON_IDENTITY {
            terms.push((j, two_site(n, a, b, l)));
        }
    }
    Ok(PauliSum { terms })
}

/// J * sum over edges of ZZ + h * sum over sites of X.
pub fn tfim_terms(lattice: Lattice, j: f64, h: f64) -> Result<PauliSum> {
    let n = lattice.check(DEFAULT_QUBIT_CAP)?;
    let mut terms: Vec<_> = lattice
        .edges()
        .into_iter()
        .map(|(a, b)| (j, two_site(n, a, b, Letter::Z)))
        .collect();
    terms.extend((0..n).map(|a| (h, one_site(n, a, Letter::X))));
    Ok(PauliSum { terms })
}

pub fn build_heisenberg(rows: usize, cols: usize, j: f64) -> Result<Array2<Complex64>> {
    let lattice = Lattice { rows, cols };
    Ok(heisenberg_terms(lattice, j)?.to_matrix(lattice.sites()))
}

pub fn build_tfim(rows: usize, cols: usize, j: f64, h: f64) -> Result<Array2<Complex64>> {
    let lattice = Lattice { rows, cols };
    Ok(tfim_terms(lattice, j, h)?.to_matrix(lattice.sites()))
}

/// Single-site operator embedded at `site` (site 0 = most significant bit).
pub fn embed_single_site(n: usize, site: usize, op: &Array2<Complex64>) -> Array2<Complex64> {
    let d = 1usize << n;
    let bit = n - 1 - site;
    let mut m = Array2::zeros((d, d));
    for col in 0..d {
        let cb = (col >> bit) & 1;
        for rb in 0..2 {
            let v = op[[rb, cb]];
            if v.norm() != 0.0 {
                let row = (col & !(1 << bit)) | (rb << bit);
                m[[row, col]] = v;
            }
        }
    }
    m
}

/// |0><1|: lowers |1> to |0>.
pub fn sigma_minus() -> Array2<Complex64> {
    let mut m = Array2::zeros((2, 2));
    m[[0, 1]] = Complex64::new(1.0, 0.0);
    m
}

/// Dephasing `Z_q` at rate `gamma_phi` and decay `sigma^-_q` at rate `gamma_1`
/// on every site; zero-rate channels are omitted.
pub fn standard_dissipator(n: usize, gamma_phi: f64, gamma_1: f64) -> Result<Vec<Jump>> {
    if !(gamma_phi >= 0.0) || !(gamma_1 >= 0.0) {
        return Err(invalid!("negative dissipation rate ({gamma_phi}, {gamma_1})"));
    }
    let z = Letter::Z.matrix();
    let lower = sigma_minus();
    let mut jumps = Vec::new();
    for q in 0..n {
        if gamma_phi > 0.0 {
            jumps.push(Jump {
                operator: embed_single_site(n, q, &z),
                rate: gamma_phi,
            });
        }
        if gamma_1 > 0.0 {
            jumps.push(Jump {
                operator: embed_single_site(n, q, &lower),
                rate: gamma_1,
            });
        }
    }
    Ok(jumps)
}
