//! Validated density matrices and the standard initial states.

use ndarray::{Array1, Array2};
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CsstError, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    entries: Array2<Complex64>,
}

impl DensityMatrix {
    /// Validates hermiticity, unit trace and numerical positivity.
    pub fn new(entries: Array2<Complex64>) -> Result<Self> {
        let rho = Self::from_entries_unchecked(entries)?;
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_entries_unchecked(entries: Array2<Complex64>) -> Result<Self> {
        let d = entries.nrows();
        if d != entries.ncols() || d < 2 || !d.is_power_of_two() {
            return Err(invalid!("density matrix shape {:?} is not 2^n x 2^n", entries.dim()));
        }
        Ok(DensityMatrix {
            n: d.trailing_zeros() as usize,
            entries,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.entries;
        if m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(CsstError::Numerical("non-finite density matrix entry".into()));
        }
        let herm = hermiticity_defect(m);
        if herm > HERMITIAN_TOL {
            return Err(CsstError::Numerical(format!("density matrix not Hermitian ({herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(CsstError::Numerical(format!("density matrix trace {tr} != 1")));
        }
        let min_eig = self.min_eigenvalue()?;
        if min_eig < -POSITIVITY_TOL {
            return Err(CsstError::Numerical(format!(
                "density matrix has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(())
    }

    pub fn from_pure(psi: &Array1<Complex64>) -> Result<Self> {
        let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid!("zero state vector"));
        }
        let psi = psi.mapv(|c| c / norm);
        let d = psi.len();
        let mut m = Array2::zeros((d, d));
        for r in 0..d {
            for c in 0..d {
                m[[r, c]] = psi[r] * psi[c].conj();
            }
        }
        Self::new(m)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let d = 1usize << n;
        Self::new(Array2::eye(d).mapv(|v: f64| Complex64::new(v / d as f64, 0.0)))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> Array2<Complex64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.diag().iter().map(|c| c.re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        // symmetrize so the Hermitian solver sees consistent triangles
        let m = &self.entries;
        let sym = Array2::from_shape_fn(m.dim(), |(r, c)| (m[[r, c]] + m[[c, r]].conj()) * 0.5);
        let vals = sym
            .eigvalsh(UPLO::Lower)
            .map_err(|e| CsstError::Numerical(format!("eigvalsh: {e}")))?;
        Ok(vals.iter().cloned().fold(f64::INFINITY, f64::min))
    }
}

pub(crate) fn hermiticity_defect(m: &Array2<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for ((r, c), v) in m.indexed_iter() {
        worst = worst.max((v - m[[c, r]].conj()).norm());
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    /// |+-+-...>, site 0 in |+>.
    PlusMinusProduct,
    /// (|0...0> + |1...1>)/sqrt(2).
    Ghz,
    /// Computational basis state, site 0 first, e.g. "0101".
    ComputationalBitstring { bits: String },
}

impl InitialState {
    pub fn parse(kind: &str, bits: Option<&str>) -> Result<Self> {
        match kind {
            "plus-minus-product" => Ok(InitialState::PlusMinusProduct),
            "ghz" => Ok(InitialState::Ghz),
            "computational-bitstring" => Ok(InitialState::ComputationalBitstring {
                bits: bits.ok_or_else(|| invalid!("computational-bitstring needs bits"))?.to_string(),
            }),
            other => Err(invalid!("unknown initial state kind {other:?}")),
        }
    }
}

pub fn initial_state(kind: &InitialState, n: usize) -> Result<DensityMatrix> {
    if n == 0 {
        return Err(invalid!("initial state needs at least one qubit"));
    }
    if n > crate::pauli::MAX_QUBITS {
        return Err(CsstError::ResourceLimit(format!("{n} qubits")));
    }
    let d = 1usize << n;
    let mut psi = Array1::<Complex64>::zeros(d);
    match kind {
        InitialState::PlusMinusProduct => {
            let amp = (d as f64).sqrt().recip();
            for x in 0..d {
                // |-> carries a minus sign on |1> at odd sites
                let mut sign = 1.0;
                for q in (1..n).step_by(2) {
                    if (x >> (n - 1 - q)) & 1 == 1 {
                        sign = -sign;
                    }
                }
                psi[x] = Complex64::new(sign * amp, 0.0);
            }
        }
        InitialState::Ghz => {
            let amp = std::f64::consts::FRAC_1_SQRT_2;
            psi[0] = Complex64::new(amp, 0.0);
            psi[d - 1] += Complex64::new(amp, 0.0);
        }
        InitialState::ComputationalBitstring { bits } => {
            if bits.len() != n {
                return Err(invalid!("bitstring {bits:?} does not have length {n}"));
            }
            let mut idx = 0usize;
            for ch in bits.chars() {
                idx <<= 1;
                match ch {
                    '0' => {}
                    '1' => idx |= 1,
                    _ => return Err(invalid!("bad bit {ch:?} in {bits:?}")),
                }
            }
            psi[idx] = Complex64::new(1.0, 0.0);
        }
    }
    DensityMatrix::from_pure(&psi)
}
