//! Cyclic coordinate descent for `min_z (1/2N) ||A z - y||^2 + alpha ||z||_1`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CsstError, Result};
use crate::scalar::Real;
use crate::transform::{MeasurementOperator, SamplingPlan};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LassoConfig<T> {
    pub alpha: T,
    /// Sweep budget (full and active-set sweeps both count).
    pub max_iters: usize,
    /// Stop when the largest coordinate change of a full sweep is at most this.
    pub tol: T,
    /// Keep the objective after every sweep in the result.
    #[serde(default)]
    pub record_objective: bool,
}

impl<T: Real> LassoConfig<T> {
    pub fn new(alpha: T) -> Self {
        LassoConfig {
            alpha,
            max_iters: DEFAULT_MAX_ITERS,
            tol: T::of(DEFAULT_TOL),
            record_objective: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= T::zero()) || !self.alpha.is_finite() {
            return Err(invalid!("alpha {} must be finite and nonnegative", self.alpha));
        }
        if !(self.tol > T::zero()) {
            return Err(invalid!("tolerance must be positive"));
        }
        if self.max_iters < 1 {
            return Err(invalid!("max_iters must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult<T> {
    pub coefficients: Vec<T>,
    /// `F^T` applied to the coefficients on the full grid.
    pub signal: Vec<T>,
    pub alpha: T,
    pub iterations: usize,
    /// `||A x - y||_2`
    pub residual: T,
    pub converged: bool,
    pub objective_trace: Vec<T>,
}

#[inline]
fn soft_threshold<T: Real>(v: T, t: T) -> T {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        T::zero()
    }
}

struct Solver<T> {
    // column-major copy of A
    cols: Vec<T>,
    m: usize,
    col_sq: Vec<T>,
    z: Vec<T>,
    r: Vec<T>,
}

impl<T: Real> Solver<T> {
    fn column(&self, k: usize) -> &[T] {
        &self.cols[k * self.m..(k + 1) * self.m]
    }

    fn sweep(&mut self, coords: &[usize], threshold: T) -> T {
        let m = self.m;
        let mut max_change = T::zero();
        for &k in coords {
            let norm = self.col_sq[k];
            if norm == T::zero() {
                continue;
            }
            let a = &self.cols[k * m..(k + 1) * m];
            let mut rho = T::zero();
            for (ai, ri) in a.iter().zip(&self.r) {
                rho += *ai * *ri;
            }
            let old = self.z[k];
            rho += norm * old;
            let new = soft_threshold(rho, threshold) / norm;
            let delta = new - old;
            if delta != T::zero() {
                for (ri, ai) in self.r.iter_mut().zip(a) {
                    *ri -= delta * *ai;
                }
                self.z[k] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        max_change
    }

    fn objective(&self, alpha: T) -> T {
        let n = T::of_usize(self.z.len());
        let fit: T = self.r.iter().map(|v| *v * *v).sum();
        let l1: T = self.z.iter().map(|v| v.abs()).sum();
        fit / (T::of(2.0) * n) + alpha * l1
    }

    /// Smallest alpha with the all-zero solution: `||A^T r||_inf / N` at `z = 0`.
    fn alpha_max(&self, y: &[T]) -> T {
        let n = self.z.len();
        let mut best = T::zero();
        for k in 0..n {
            let g: T = self.column(k).iter().zip(y).map(|(a, b)| *a * *b).sum();
            best = best.max(g.abs());
        }
        best / T::of_usize(n)
    }

    /// Alternating full / active-set sweeps at one penalty. Returns
    /// (sweeps used, converged).
    fn solve(&mut self, alpha: T, tol: T, budget: usize, trace: &mut Option<Vec<T>>) -> Result<(usize, bool)> {
        let n = self.z.len();
        let threshold = T::of_usize(n) * alpha;
        let all: Vec<usize> = (0..n).collect();
        let mut used = 0;
        let record = |s: &Self, trace: &mut Option<Vec<T>>| {
            if let Some(t) = trace {
                t.push(s.objective(alpha));
            }
        };
        while used < budget {
            let change = self.sweep(&all, threshold);
            used += 1;
            record(self, trace);
            if !change.is_finite() {
                return Err(CsstError::Numerical("coordinate descent diverged".into()));
            }
            if change <= tol {
                return Ok((used, true));
            }
            let active: Vec<usize> = all.iter().copied().filter(|&k| self.z[k] != T::zero()).collect();
            while used < budget {
                let change = self.sweep(&active, threshold);
                used += 1;
                record(self, trace);
                if change <= tol {
                    break;
                }
            }
        }
        Ok((used, false))
    }
}

/// Continuation stages per decade of alpha for cold starts.
const STAGES_PER_DECADE: f64 = 4.0;

/// LASSO by cyclic coordinate descent with exact soft-threshold updates.
///
/// Full sweeps alternate with sweeps restricted to the nonzero coordinates;
/// convergence is only declared after a full sweep. Without a warm start the
/// penalty is lowered geometrically from the zero-solution threshold, warm
/// starting each stage, before the final solve at `cfg.alpha`.
pub fn lasso_cd<T: Real>(
    op: &MeasurementOperator<T>,
    y: &[T],
    cfg: &LassoConfig<T>,
    warm: Option<&[T]>,
) -> Result<ReconstructionResult<T>> {
    cfg.validate()?;
    let (m, n) = (op.rows(), op.cols());
    if y.len() != m {
        return Err(invalid!("measurement length {} != operator rows {m}", y.len()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(CsstError::Numerical("non-finite measurement".into()));
    }
    let z0 = match warm {
        Some(w) if w.len() == n => w.to_vec(),
        Some(w) => return Err(invalid!("warm start length {} != {n}", w.len())),
        None => vec![T::zero(); n],
    };
    let mut cols = Vec::with_capacity(m * n);
    for k in 0..n {
        cols.extend((0..m).map(|i| op.entry(i, k)));
    }
    let col_sq = cols.chunks_exact(m.max(1)).map(|c| c.iter().map(|v| *v * *v).sum()).collect();
    let ax = op.apply(&z0)?;
    let r: Vec<T> = y.iter().zip(&ax).map(|(a, b)| *a - *b).collect();
    let mut solver = Solver { cols, m, col_sq, z: z0, r };

    let mut trace = cfg.record_objective.then(Vec::new);
    if let Some(t) = trace.as_mut() {
        t.push(solver.objective(cfg.alpha));
    }
    let mut iterations = 0;
    if warm.is_none() {
        let top = solver.alpha_max(y);
        if top > cfg.alpha {
            let ratio = T::of(10f64.powf(-1.0 / STAGES_PER_DECADE));
            let mut stage = top * ratio;
            // Intermediate stages are not traced: the objective changes with alpha.
            while stage > cfg.alpha && iterations < cfg.max_iters {
                let (used, _) = solver.solve(stage, cfg.tol, cfg.max_iters - iterations, &mut None)?;
                iterations += used;
                stage *= ratio;
            }
            if let Some(t) = trace.as_mut() {
                t.clear();
                t.push(solver.objective(cfg.alpha));
            }
        }
    }
    let (used, converged) = solver.solve(cfg.alpha, cfg.tol, cfg.max_iters.saturating_sub(iterations), &mut trace)?;
    iterations += used;

    let residual = solver.r.iter().map(|v| *v * *v).sum::<T>().sqrt();
    let signal = op.basis().inverse(&solver.z)?;
    Ok(ReconstructionResult {
        coefficients: solver.z,
        signal,
        alpha: cfg.alpha,
        iterations,
        residual,
        converged,
        objective_trace: trace.unwrap_or_default(),
    })
}

/// Recovers the full-length signal from samples ordered by ascending index.
pub fn reconstruct_signal<T: Real>(plan: &SamplingPlan, samples: &[T], alpha: T) -> Result<ReconstructionResult<T>> {
    let op = MeasurementOperator::dct(plan.clone())?;
    reconstruct_with(&op, samples, &LassoConfig::new(alpha), None)
}

/// Rescales `samples` by `sqrt(N/m)` and solves against `op`.
pub fn reconstruct_with<T: Real>(
    op: &MeasurementOperator<T>,
    samples: &[T],
    cfg: &LassoConfig<T>,
    warm: Option<&[T]>,
) -> Result<ReconstructionResult<T>> {
    if samples.len() != op.rows() {
        return Err(invalid!("{} samples for a mask of size {}", samples.len(), op.rows()));
    }
    let y: Vec<T> = samples.iter().map(|&v| v * op.scale()).collect();
    lasso_cd(op, &y, cfg, warm)
}

/// `points` values log-spaced over `[lo, hi]`, ascending.
pub fn log_grid<T: Real>(lo: T, hi: T, points: usize) -> Result<Vec<T>> {
    if !(lo > T::zero()) || !(hi >= lo) || points < 1 {
        return Err(invalid!("bad log grid [{lo}, {hi}] x {points}"));
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    let steps = T::of_usize(points - 1);
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == points - 1 {
                hi
            } else {
                (a + (b - a) * T::of_usize(i) / steps).exp()
            }
        })
        .collect())
}

/// 30 points over `[1e-7, 1e-2]`.
pub fn default_alpha_grid<T: Real>() -> Vec<T> {
    log_grid(T::of(1e-7), T::of(1e-2), 30).expect("valid default grid")
}

#[derive(Debug, Clone)]
pub struct SweepEntry<T> {
    pub alpha: T,
    pub result: ReconstructionResult<T>,
    pub rmse: Option<T>,
}

#[derive(Debug, Clone)]
pub struct AlphaSweep<T> {
    /// In the order of the supplied grid.
    pub entries: Vec<SweepEntry<T>>,
    /// Index of the smallest RMSE against the truth (first on ties).
    pub best: Option<usize>,
}

impl<T: Real> AlphaSweep<T> {
    pub fn best_entry(&self) -> Option<&SweepEntry<T>> {
        self.best.map(|i| &self.entries[i])
    }
}

/// One reconstruction per alpha, warm-started from the next larger alpha.
pub fn alpha_sweep<T: Real>(
    op: &MeasurementOperator<T>,
    samples: &[T],
    alpha_grid: &[T],
    truth: Option<&[T]>,
    base: &LassoConfig<T>,
) -> Result<AlphaSweep<T>> {
    if alpha_grid.is_empty() {
        return Err(invalid!("empty alpha grid"));
    }
    if let Some(t) = truth {
        if t.len() != op.cols() {
            return Err(invalid!("truth length {} != {}", t.len(), op.cols()));
        }
    }
    let mut order: Vec<usize> = (0..alpha_grid.len()).collect();
    order.sort_by(|&a, &b| alpha_grid[b].partial_cmp(&alpha_grid[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut slots: Vec<Option<SweepEntry<T>>> = vec![None; alpha_grid.len()];
    let mut warm: Option<Vec<T>> = None;
    for idx in order {
        let cfg = LassoConfig {
            alpha: alpha_grid[idx],
            ..*base
        };
        let result = reconstruct_with(op, samples, &cfg, warm.as_deref())?;
        let rmse = truth.map(|t| crate::metrics::rmse(t, &result.signal)).transpose()?;
        warm = Some(result.coefficients.clone());
        slots[idx] = Some(SweepEntry {
            alpha: alpha_grid[idx],
            result,
            rmse,
        });
    }
    let entries: Vec<SweepEntry<T>> = slots.into_iter().map(|e| e.expect("every alpha solved")).collect();
    let best = if truth.is_some() {
        let mut best = 0;
        for (i, e) in entries.iter().enumerate() {
            if e.rmse.unwrap() < entries[best].rmse.unwrap() {
                best = i;
            }
        }
        Some(best)
    } else {
        None
    };
    Ok(AlphaSweep { entries, best })
}

/// Penalty whose LASSO solution has residual `||A x - y||_2` close to `eta`,
/// found by bisection in log-alpha over `[lo, hi]`; a stand-in for the
/// residual-constrained basis pursuit program.
pub fn alpha_for_residual<T: Real>(
    op: &MeasurementOperator<T>,
    samples: &[T],
    eta: T,
    lo: T,
    hi: T,
    base: &LassoConfig<T>,
) -> Result<ReconstructionResult<T>> {
    if !(eta > T::zero()) || !(lo > T::zero()) || !(hi > lo) {
        return Err(invalid!("bad residual target {eta} or bracket [{lo}, {hi}]"));
    }
    let solve = |alpha: T, warm: Option<&[T]>| reconstruct_with(op, samples, &LassoConfig { alpha, ..*base }, warm);
    let mut low = solve(lo, None)?;
    if low.residual >= eta {
        return Ok(low);
    }
    let high = solve(hi, None)?;
    if high.residual <= eta {
        return Ok(high);
    }
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..60 {
        let mid = (a + b) / T::of(2.0);
        let r = solve(mid.exp(), Some(&low.coefficients))?;
        if r.residual > eta {
            b = mid;
        } else {
            a = mid;
            low = r;
        }
        if b - a < T::of(1e-6) {
            break;
        }
    }
    Ok(low)
}
