//! Closed-form sampling-rate, shot-ratio and tail-bound calculators.
//!
//! Constants in `TheoryParams` are not fixed by the underlying analysis;
//! the defaults are placeholders and every output that uses them should say so.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CsstError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryParams {
    pub c1: f64,
    pub c2: f64,
    /// Target `delta_2s`; must stay below `4/sqrt(41)`.
    pub rip_constant_target: f64,
    /// Prefactor `C_m` in `m = C_m s ln^2(s) ln N`.
    pub m_rate_constant: f64,
}

impl Default for TheoryParams {
    fn default() -> Self {
        TheoryParams {
            c1: 4.0,
            c2: 4.0,
            rip_constant_target: 0.6,
            m_rate_constant: 1.0,
        }
    }
}

impl TheoryParams {
    pub const NOTE: &'static str = "c1, c2, C_m and delta_2s are unspecified constants; values are configurable defaults";

    pub fn rip_threshold() -> f64 {
        4.0 / 41f64.sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("m_rate_constant", self.m_rate_constant)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid!("{name} must be positive, got {v}"));
            }
        }
        let d = self.rip_constant_target;
        if !(d > 0.0 && d < Self::rip_threshold()) {
            return Err(invalid!("delta_2s = {d} outside (0, 4/sqrt(41))"));
        }
        Ok(())
    }
}

/// Splits a total failure probability into `(delta_st, delta_rip)`.
pub fn split_failure(delta: f64, st_share: f64) -> Result<(f64, f64)> {
    check_delta(delta)?;
    if !(st_share > 0.0 && st_share < 1.0) {
        return Err(invalid!("share {st_share} outside (0, 1)"));
    }
    Ok((delta * st_share, delta * (1.0 - st_share)))
}

/// `min(N, ceil(C_m s ln^2(max(s,2)) ln N))`
pub fn required_timesteps(s: usize, n: usize, tp: &TheoryParams) -> Result<usize> {
    tp.validate()?;
    if s < 1 || s > n {
        return Err(invalid!("need 1 <= s <= N, got s={s}, N={n}"));
    }
    let raw = required_timesteps_unclamped(s, n, tp);
    let m = crate::shadow::budget::ceil_count(raw).max(1);
    Ok((m as usize).min(n))
}

pub fn required_timesteps_unclamped(s: usize, n: usize, tp: &TheoryParams) -> f64 {
    let l = (s.max(2) as f64).ln();
    tp.m_rate_constant * s as f64 * l * l * (n as f64).ln()
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid!("failure probability {delta} outside (0, 1)"));
    }
    Ok(())
}

/// `(N/m) ln(N M / delta) / ln(m M / delta)`
pub fn shot_ratio_exact(n: usize, m: usize, m_family: u64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if m < 1 || m > n || m_family < 1 {
        return Err(invalid!("need 1 <= m <= N and M >= 1 (N={n}, m={m}, M={m_family})"));
    }
    let (nf, mf, fam) = (n as f64, m as f64, m_family as f64);
    Ok(nf / mf * (nf * fam / delta).ln() / (mf * fam / delta).ln())
}

/// `c1 ln(N/s) / sqrt(s)`
pub fn b_rms(s: usize, n: usize, c1: f64) -> Result<f64> {
    if s < 1 || s > n {
        return Err(invalid!("need 1 <= s <= N, got s={s}, N={n}"));
    }
    if !(c1 > 0.0) {
        return Err(invalid!("c1 must be positive"));
    }
    Ok(c1 * (n as f64 / s as f64).ln() / (s as f64).sqrt())
}

/// Exact ratio scaled by `((eps - b)/eps)^2`; requires `b < eps`.
pub fn shot_ratio_approx(n: usize, m: usize, m_family: u64, delta: f64, eps_rms: f64, b: f64) -> Result<f64> {
    if !(eps_rms > 0.0) || !(b >= 0.0) {
        return Err(invalid!("need eps_rms > 0 and b >= 0"));
    }
    if b >= eps_rms {
        return Err(CsstError::InfeasibleTolerance { bound: b, target: eps_rms });
    }
    let f = (eps_rms - b) / eps_rms;
    Ok(shot_ratio_exact(n, m, m_family, delta)? * f * f)
}

/// `C_r / (r - 1) * s^(1 - r)`
pub fn l1_tail_powerlaw(c_r: f64, r: f64, s: usize) -> Result<f64> {
    if !(r > 1.0) {
        return Err(invalid!("decay exponent r = {r} must exceed 1"));
    }
    if !(c_r > 0.0) || s < 1 {
        return Err(invalid!("need C_r > 0 and s >= 1"));
    }
    Ok(c_r / (r - 1.0) * (s as f64).powf(1.0 - r))
}

/// Per-coefficient bound on `|DCT-II(e^{-gamma t} cos(omega t + phi))_k|` over
/// `t = n dt`, `n < N`. The bound does not depend on `phi`.
pub fn dct_envelope_bound(gamma: f64, omega: f64, dt: f64, n: usize, _phi: f64) -> Result<Vec<f64>> {
    if !(gamma >= 0.0) || !(dt > 0.0) || n < 1 || !omega.is_finite() {
        return Err(invalid!("need gamma >= 0, dt > 0, N >= 1"));
    }
    let big_gamma = gamma * dt;
    let theta = omega * dt;
    let decay = (-big_gamma).exp();
    let nf = n as f64;
    let term = |beta: f64| {
        let h = (beta / 2.0).sin();
        let den = ((1.0 - decay).powi(2) + 4.0 * decay * h * h).sqrt();
        if den > 0.0 {
            nf.min(2.0 / den)
        } else {
            nf
        }
    };
    Ok((0..n)
        .map(|k| {
            let c = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            let a = std::f64::consts::PI * k as f64 / nf;
            0.5 * c * (term(theta + a) + term(theta - a))
        })
        .collect())
}
