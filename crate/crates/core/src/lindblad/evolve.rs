use ndarray::{Array1, Array2};
use num_complex::Complex64;

use super::expm::expm;
use super::{LindbladModel, TimeGrid, DEFAULT_QUBIT_CAP};
use crate::error::{invalid, CsstError, Result};
use crate::pauli::{expectation, PauliString};
use crate::state::DensityMatrix;

/// Column-stacking superoperator with `vec(d rho/dt) = L vec(rho)`.
pub fn vectorize_lindbladian(model: &LindbladModel) -> Result<Array2<Complex64>> {
    vectorize_lindbladian_capped(model, DEFAULT_QUBIT_CAP)
}

pub fn vectorize_lindbladian_capped(model: &LindbladModel, max_qubits: usize) -> Result<Array2<Complex64>> {
    if model.num_qubits() > max_qubits {
        return Err(CsstError::ResourceLimit(format!(
            "dense generator on {} qubits exceeds cap {max_qubits}",
            model.num_qubits()
        )));
    }
    let d = model.dim();
    let mut l = Array2::<Complex64>::zeros((d * d, d * d));
    let minus_i = Complex64::new(0.0, -1.0);

    // vec(A X B) = (B^T kron A) vec(X); row index of (r, c) is c*d + r
    let add_left = |l: &mut Array2<Complex64>, a: &Array2<Complex64>, coef: Complex64| {
        // I kron A
        for c in 0..d {
            for r in 0..d {
                for rp in 0..d {
                    let v = a[[r, rp]];
                    if v.norm_sqr() != 0.0 {
                        l[[c * d + r, c * d + rp]] += coef * v;
                    }
                }
            }
        }
    };
    let add_right = |l: &mut Array2<Complex64>, b: &Array2<Complex64>, coef: Complex64| {
        // B^T kron I
        for c in 0..d {
            for cp in 0..d {
                let v = b[[cp, c]];
                if v.norm_sqr() != 0.0 {
                    for r in 0..d {
                        l[[c * d + r, cp * d + r]] += coef * v;
                    }
                }
            }
        }
    };

    let h = model.hamiltonian();
    add_left(&mut l, h, minus_i);
    add_right(&mut l, h, -minus_i);

    for jump in model.jumps() {
        if jump.rate == 0.0 {
            continue;
        }
        let g = Complex64::new(jump.rate, 0.0);
        let op = &jump.operator;
        let op_dag = op.t().mapv(|v| v.conj());
        let ldl = op_dag.dot(op);
        // L rho L^dag -> conj(L) kron L
        for c in 0..d {
            for cp in 0..d {
                let outer = op[[c, cp]].conj();
                if outer.norm_sqr() == 0.0 {
                    continue;
                }
                for r in 0..d {
                    for rp in 0..d {
                        let inner = op[[r, rp]];
                        if inner.norm_sqr() != 0.0 {
                            l[[c * d + r, cp * d + rp]] += g * outer * inner;
                        }
                    }
                }
            }
        }
        add_left(&mut l, &ldl, -g * 0.5);
        add_right(&mut l, &ldl, -g * 0.5);
    }
    Ok(l)
}

pub(crate) fn vec_of(m: &Array2<Complex64>) -> Array1<Complex64> {
    let d = m.nrows();
    Array1::from_shape_fn(d * d, |k| m[[k % d, k / d]])
}

pub(crate) fn unvec(v: &Array1<Complex64>, d: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((d, d), |(r, c)| v[c * d + r])
}

/// States on the grid, `rho(t_0) = rho0`, advanced by one dense propagator
/// `exp(dt L)` applied repeatedly.
pub fn evolve_grid(model: &LindbladModel, rho0: &DensityMatrix, grid: &TimeGrid) -> Result<Vec<DensityMatrix>> {
    if rho0.num_qubits() != model.num_qubits() {
        return Err(invalid!(
            "state on {} qubits, model on {}",
            rho0.num_qubits(),
            model.num_qubits()
        ));
    }
    let d = model.dim();
    let generator = vectorize_lindbladian(model)?;
    let propagator = expm(&generator.mapv(|v| v * grid.dt))?;

    let mut states = Vec::with_capacity(grid.n_steps);
    states.push(rho0.clone());
    let mut v = vec_of(rho0.matrix());
    for _ in 1..grid.n_steps {
        v = propagator.dot(&v);
        if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(CsstError::Numerical("propagated state has non-finite entries".into()));
        }
        states.push(DensityMatrix::new(unvec(&v, d))?);
    }
    Ok(states)
}

/// Rows are observables, columns timesteps: `S_ij = Tr(O_i rho(t_j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    pub values: Array2<f64>,
    pub observables: Vec<PauliString>,
    pub grid: TimeGrid,
}

impl SignalMatrix {
    pub fn new(values: Array2<f64>, observables: Vec<PauliString>, grid: TimeGrid) -> Result<Self> {
        if values.nrows() != observables.len() || values.ncols() != grid.n_steps {
            return Err(invalid!(
                "signal shape {:?} vs {} observables x {} steps",
                values.dim(),
                observables.len(),
                grid.n_steps
            ));
        }
        Ok(SignalMatrix { values, observables, grid })
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).to_vec()
    }
}

pub fn signal_matrix(
    states: &[DensityMatrix],
    observables: &[PauliString],
    grid: TimeGrid,
) -> Result<SignalMatrix> {
    if states.is_empty() || observables.is_empty() {
        return Err(invalid!("signal matrix needs states and observables"));
    }
    if states.len() != grid.n_steps {
        return Err(invalid!("{} states for a {}-step grid", states.len(), grid.n_steps));
    }
    let mut values = Array2::zeros((observables.len(), states.len()));
    for (j, rho) in states.iter().enumerate() {
        for (i, p) in observables.iter().enumerate() {
            let v = expectation(p, rho)?;
            if v.abs() > 1.0 + 1e-6 {
                return Err(CsstError::Numerical(format!("expectation {v} of {p} out of range")));
            }
            values[[i, j]] = v;
        }
    }
    SignalMatrix::new(values, observables.to_vec(), grid)
}
