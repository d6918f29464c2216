//! Calculator table for the `theory` subcommand.

use csst_core::recovery::theory::{
    b_rms, l1_tail_powerlaw, required_timesteps, required_timesteps_unclamped, shot_ratio_approx, shot_ratio_exact,
    split_failure, TheoryParams,
};
use csst_core::shadow::{baseline_budget, bernstein_shots, mom_shots};
use csst_core::{family_size, CsstError};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoryRow {
    pub quantity: String,
    pub inputs: String,
    pub value: String,
    pub note: String,
}

impl TheoryRow {
    pub const HEADER: &'static [&'static str] = &["quantity", "inputs", "value", "note"];

    fn new(quantity: &str, inputs: String, value: impl ToString, note: &str) -> Self {
        TheoryRow {
            quantity: quantity.into(),
            inputs,
            value: value.to_string(),
            note: note.into(),
        }
    }
}

fn family_u64(n: usize, w: usize) -> Result<u64> {
    u64::try_from(family_size(n, w)).map_err(|_| CsstError::ResourceLimit(format!("family size for n={n}, w={w}")).into())
}

pub fn theory_rows(cfg: &ExperimentConfig) -> Result<Vec<TheoryRow>> {
    let th = &cfg.theory;
    let tp: TheoryParams = th.constants;
    tp.validate()?;
    let n_q = cfg.num_qubits();
    let w = cfg.w_max;
    let n = cfg.grid.n_steps;
    let fam = family_u64(n_q, w)?;
    let s = th.sparsity.clamp(1, n);
    let (delta_st, delta_cs) = split_failure(th.delta, th.failure_share)?;
    let mut rows = Vec::new();

    rows.push(TheoryRow::new("family_size", format!("n={n_q} w_max={w}"), fam, ""));
    for (wr, eps, delta, m_ref) in [(w, th.eps_rms, th.delta, fam), (4, 1e-2, 1e-2, 1908)] {
        let inputs = format!("w={wr} eps={eps} delta={delta} M={m_ref}");
        rows.push(TheoryRow::new("bernstein_shots", inputs.clone(), bernstein_shots(wr, eps, delta, m_ref)?, ""));
        let (shots, k) = mom_shots(wr, eps, delta, m_ref)?;
        rows.push(TheoryRow::new("mom_shots", inputs.clone(), shots, ""));
        rows.push(TheoryRow::new("mom_batches", inputs, k, "rounded up to odd"));
    }
    let b = baseline_budget(w, th.eps_rms, fam, delta_st, n as u64)?;
    let inputs = format!("w={w} eps_rms={} M={fam} delta={delta_st} N={n}", th.eps_rms);
    rows.push(TheoryRow::new("baseline_shots_per_timestep", inputs.clone(), b.per_timestep, ""));
    rows.push(TheoryRow::new("baseline_shots_total", inputs, b.total, ""));
    rows.push(TheoryRow::new(
        "split_failure",
        format!("delta={} share={}", th.delta, th.failure_share),
        format!("{delta_st};{delta_cs}"),
        "shadow;recovery",
    ));
    rows.push(TheoryRow::new("rip_threshold", String::new(), TheoryParams::rip_threshold(), "4/sqrt(41)"));

    let m_req = required_timesteps(s, n, &tp)?;
    let raw = required_timesteps_unclamped(s, n, &tp);
    let note = if raw > n as f64 { "clamped to N" } else { TheoryParams::NOTE };
    rows.push(TheoryRow::new(
        "required_timesteps",
        format!("s={s} N={n} C_m={}", tp.m_rate_constant),
        m_req,
        note,
    ));

    let mut ms: Vec<usize> = cfg.masks.clone();
    if !ms.contains(&m_req) {
        ms.push(m_req);
    }
    ms.sort_unstable();
    ms.dedup();
    let b_s = b_rms(s, n, tp.c1)?;
    rows.push(TheoryRow::new("b_rms", format!("s={s} N={n} c1={}", tp.c1), b_s, TheoryParams::NOTE));
    for &m in &ms {
        let inputs = format!("N={n} m={m} M={fam} delta={}", th.delta);
        rows.push(TheoryRow::new("shot_ratio_exact", inputs.clone(), shot_ratio_exact(n, m, fam, th.delta)?, ""));
        let approx = match shot_ratio_approx(n, m, fam, th.delta, th.eps_rms, b_s) {
            Ok(v) => v.to_string(),
            Err(CsstError::InfeasibleTolerance { .. }) => "infeasible".into(),
            Err(e) => return Err(e.into()),
        };
        rows.push(TheoryRow::new(
            "shot_ratio_approx",
            format!("{inputs} eps_rms={} B={b_s}", th.eps_rms),
            approx,
            "infeasible when B_RMS >= eps_rms",
        ));
    }
    rows.push(TheoryRow::new(
        "l1_tail",
        format!("C_r={} r={} s={s}", th.tail_c, th.tail_r),
        l1_tail_powerlaw(th.tail_c, th.tail_r, s)?,
        "",
    ));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Profile;

    fn value<'a>(rows: &'a [TheoryRow], q: &str) -> Vec<&'a str> {
        rows.iter().filter(|r| r.quantity == q).map(|r| r.value.as_str()).collect()
    }

    #[test]
    fn desk_table() {
        let cfg = ExperimentConfig::preset(Profile::Desk);
        let rows = theory_rows(&cfg).unwrap();
        // 3 * 3 + 3 * 9
        assert_eq!(value(&rows, "family_size"), ["36"]);
        let bern: Vec<u64> = value(&rows, "bernstein_shots").iter().map(|v| v.parse().unwrap()).collect();
        assert!((19_000_000..=22_000_000).contains(&bern[1]));
        let ratio: Vec<f64> = value(&rows, "shot_ratio_exact").iter().map(|v| v.parse().unwrap()).collect();
        // m = N gives exactly one
        assert_eq!(*ratio.last().unwrap(), 1.0);
        assert!(ratio.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn loose_tolerance_is_infeasible() {
        let mut cfg = ExperimentConfig::preset(Profile::Desk);
        cfg.theory.eps_rms = 1e-3;
        let rows = theory_rows(&cfg).unwrap();
        assert!(value(&rows, "shot_ratio_approx").iter().all(|v| *v == "infeasible"));
    }
}
