//! Worst-case snapshot counts for Pauli shadows (variance bound 3^w, range 2*3^w).

use serde::Serialize;

use crate::error::{invalid, Result};

/// Ceiling that forgives floating-point noise just above an integer.
pub(crate) fn ceil_count(x: f64) -> u64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

fn check(w: usize, eps: f64, delta: f64, m_family: u64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid!("accuracy {eps} must be positive"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid!("failure probability {delta} outside (0, 1)"));
    }
    if m_family < 1 {
        return Err(invalid!("observable family must be nonempty"));
    }
    if w > 64 {
        return Err(invalid!("weight {w} unreasonably large"));
    }
    Ok(())
}

/// Bernstein count with a union bound over `m_family` observables:
/// `ceil(3^w / eps^2 * ln(2 M / delta) * (2 + 2 eps / 3))`.
pub fn bernstein_shots(w: usize, eps: f64, delta: f64, m_family: u64) -> Result<u64> {
    check(w, eps, delta, m_family)?;
    let var = 3f64.powi(w as i32);
    let log = (2.0 * m_family as f64 / delta).ln();
    Ok(ceil_count(var / (eps * eps) * log * (2.0 + 2.0 * eps / 3.0)))
}

/// Accuracy guaranteed by `n_snap` snapshots under the Bernstein count;
/// the positive root of `3^w L (2/eps^2 + 2/(3 eps)) = n_snap`.
pub fn bernstein_epsilon(w: usize, n_snap: u64, delta: f64, m_family: u64) -> Result<f64> {
    check(w, 1.0, delta, m_family)?;
    if n_snap == 0 {
        return Err(invalid!("need at least one snapshot"));
    }
    let a = 3f64.powi(w as i32) * (2.0 * m_family as f64 / delta).ln();
    let n = n_snap as f64;
    // 2a u^2 + (2a/3) u - n = 0 with u = 1/eps
    let u = (-(2.0 * a / 3.0) + ((2.0 * a / 3.0).powi(2) + 8.0 * a * n).sqrt()) / (4.0 * a);
    Ok(1.0 / u)
}

/// Median-of-means count and batch number, union bound over `m_family`:
/// shots `ceil(32 ln(M/delta) 3^w / eps^2)`, batches `ceil(8 ln(M/delta))`
/// bumped to the next odd integer.
pub fn mom_shots(w: usize, eps: f64, delta: f64, m_family: u64) -> Result<(u64, u64)> {
    check(w, eps, delta, m_family)?;
    let log = (m_family as f64 / delta).ln();
    let shots = ceil_count(32.0 * log * 3f64.powi(w as i32) / (eps * eps));
    let mut k = ceil_count(8.0 * log).max(1);
    if k % 2 == 0 {
        k += 1;
    }
    Ok((shots, k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShotBudget {
    pub per_timestep: u64,
    pub total: u64,
}

/// Shadow tomography at every one of `n_timesteps` steps, failure
/// probability split as `delta / N` per step.
pub fn baseline_budget(w: usize, eps_rms: f64, m_family: u64, delta: f64, n_timesteps: u64) -> Result<ShotBudget> {
    if n_timesteps < 1 {
        return Err(invalid!("need at least one timestep"));
    }
    let per = bernstein_shots(w, eps_rms, delta / n_timesteps as f64, m_family)?;
    Ok(ShotBudget {
        per_timestep: per,
        total: per * n_timesteps,
    })
}
