use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse, SVD};
use num_complex::Complex64;

use super::evolve::vec_of;
use crate::error::{invalid, CsstError, Result};
use crate::pauli::{pauli_matrix_capped, PauliString, MAX_QUBITS};
use crate::state::DensityMatrix;

pub const DEFAULT_CONDITION_CAP: f64 = 1e8;
const GROWTH_TOL: f64 = 1e-8;

/// Right eigenvectors `r_k` and dual left vectors `l_k` (rows of R^{-1}) of
/// a diagonalizable generator.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    eigenvalues: Array1<Complex64>,
    right: Array2<Complex64>,
    left: Array2<Complex64>,
    condition: f64,
}

impl ModalBasis {
    pub fn new(generator: &Array2<Complex64>, condition_cap: f64) -> Result<Self> {
        if generator.nrows() != generator.ncols() {
            return Err(invalid!("generator is not square"));
        }
        let (eigenvalues, mut right) = generator
            .eig()
            .map_err(|e| CsstError::Numerical(format!("eigendecomposition failed: {e}")))?;
        if let Some(bad) = eigenvalues.iter().find(|v| v.re > GROWTH_TOL) {
            return Err(CsstError::Numerical(format!("generator has growing mode {bad}")));
        }
        for mut col in right.columns_mut() {
            let norm = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            col.mapv_inplace(|v| v / norm);
        }
        let (_, sv, _) = right
            .svd(false, false)
            .map_err(|e| CsstError::Numerical(format!("svd failed: {e}")))?;
        let smax = sv.iter().cloned().fold(0.0, f64::max);
        let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition <= condition_cap) {
            return Err(CsstError::NotDiagonalizable {
                kappa: condition,
                cap: condition_cap,
            });
        }
        let left = right
            .inv()
            .map_err(|e| CsstError::Numerical(format!("eigenvector inverse failed: {e}")))?;
        Ok(ModalBasis {
            eigenvalues,
            right,
            left,
            condition,
        })
    }

    pub fn eigenvalues(&self) -> &Array1<Complex64> {
        &self.eigenvalues
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Per-mode weights `<<O|r_k>> <<l_k|rho0>>`.
    pub fn decompose(&self, rho0: &DensityMatrix, obs: &PauliString) -> Result<ModalDecomposition> {
        let dd = self.right.nrows();
        if rho0.dim() * rho0.dim() != dd || obs.num_qubits() != rho0.num_qubits() {
            return Err(invalid!("state/observable dimensions do not match the generator"));
        }
        let o = vec_of(&pauli_matrix_capped(obs, MAX_QUBITS)?);
        let r0 = vec_of(rho0.matrix());
        let init = self.left.dot(&r0);
        let weights = (0..dd)
            .map(|k| {
                let overlap: Complex64 = o.iter().zip(self.right.column(k)).map(|(a, b)| a.conj() * b).sum();
                overlap * init[k]
            })
            .collect();
        Ok(ModalDecomposition {
            eigenvalues: self.eigenvalues.to_vec(),
            mode_weights: weights,
            condition: self.condition,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ModalDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub mode_weights: Vec<Complex64>,
    pub condition: f64,
}

impl ModalDecomposition {
    /// `Re sum_k exp(lambda_k t) w_k`.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.mode_weights)
            .map(|(l, w)| ((l * t).exp() * w).re)
            .sum()
    }

    /// Index of the mode with the largest weight magnitude.
    pub fn dominant_mode(&self) -> usize {
        let mut best = 0;
        for (k, w) in self.mode_weights.iter().enumerate() {
            if w.norm() > self.mode_weights[best].norm() {
                best = k;
            }
        }
        best
    }
}

pub fn modal_expansion(
    generator: &Array2<Complex64>,
    rho0: &DensityMatrix,
    obs: &PauliString,
) -> Result<ModalDecomposition> {
    ModalBasis::new(generator, DEFAULT_CONDITION_CAP)?.decompose(rho0, obs)
}
