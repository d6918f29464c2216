//! Plot-data tables: compressibility, baseline error, alpha curves,
//! optimal-alpha statistics, m*, SRF and per-observable scatter.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use csst_core::lindblad::SignalMatrix;
use csst_core::metrics::{aggregate_by_weight, MeanStd};
use csst_core::transform::truncation_rmse_curve;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{ExpError, Result};
use crate::output::write_rows;
use crate::pipeline::{ReportRow, SweepRow};

pub struct CellData {
    pub n_st: usize,
    pub m: usize,
    pub reports: Vec<ReportRow>,
    pub sweeps: Vec<SweepRow>,
}

#[derive(Serialize)]
struct TruncRow<'a> {
    pauli: &'a str,
    weight: usize,
    s: usize,
    rmse: f64,
}

#[derive(Serialize)]
struct TruncSectorRow {
    weight: usize,
    s: usize,
    observables: usize,
    mean_rmse: f64,
    relative: f64,
}

#[derive(Serialize)]
struct BaselineRow {
    n_st: usize,
    weight: usize,
    kept: usize,
    mean_rmse_st: Option<f64>,
    std_rmse_st: Option<f64>,
}

#[derive(Serialize)]
struct SrfRow {
    n_st: usize,
    m: usize,
    weight: usize,
    kept: usize,
    mean_rmse_st: Option<f64>,
    mean_rmse_cs: Option<f64>,
    ratio: Option<f64>,
    srf_sector: Option<f64>,
    srf_mean: Option<f64>,
    n_over_m: f64,
}

#[derive(Serialize)]
struct AlphaStarRow {
    n_st: usize,
    m: usize,
    weight: usize,
    kept: usize,
    mean: Option<f64>,
    std: Option<f64>,
}

#[derive(Serialize)]
struct AlphaCurveRow {
    n_st: usize,
    m: usize,
    weight: usize,
    alpha: f64,
    mean_rmse: f64,
}

#[derive(Serialize)]
struct MStarRow {
    n_st: usize,
    weight: usize,
    m_star: Option<usize>,
}

#[derive(Serialize)]
struct ScatterRow<'a> {
    n_st: usize,
    m: usize,
    pauli: &'a str,
    weight: usize,
    rmse_st: f64,
    rmse_cs_best: f64,
}

/// Sector means of `rmse_st` and `rmse_cs_best` over kept observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorErrors {
    pub kept: usize,
    pub rmse_st: f64,
    pub rmse_cs: f64,
}

impl SectorErrors {
    pub fn ratio(&self) -> f64 {
        self.rmse_cs / self.rmse_st
    }

    /// `(N/m) / R^2` with `R` the ratio of sector means.
    pub fn srf(&self, n: usize, m: usize) -> Option<f64> {
        let r = self.ratio();
        (r > 0.0 && r.is_finite()).then(|| n as f64 / m as f64 / (r * r))
    }
}

pub fn sector_errors(reports: &[ReportRow]) -> BTreeMap<usize, SectorErrors> {
    let mut acc: BTreeMap<usize, (usize, f64, f64)> = BTreeMap::new();
    for r in reports.iter().filter(|r| r.status == "kept") {
        let e = acc.entry(r.weight).or_default();
        e.0 += 1;
        e.1 += r.rmse_st;
        e.2 += r.rmse_cs_best;
    }
    acc.into_iter()
        .map(|(w, (k, st, cs))| {
            (
                w,
                SectorErrors {
                    kept: k,
                    rmse_st: st / k as f64,
                    rmse_cs: cs / k as f64,
                },
            )
        })
        .collect()
}

pub fn write_figures(cfg: &ExperimentConfig, truth: &SignalMatrix, cells: &[CellData], dir: &Path) -> Result<Vec<PathBuf>> {
    let n = cfg.grid.n_steps;
    let mut written = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let p = dir.join(name);
        f(&p)?;
        written.push(p);
        Ok(())
    };

    // compressibility, sector means over every observable of a weight
    let s_values: Vec<usize> = (1..=n).collect();
    let mut curves = Vec::new();
    for (i, p) in truth.observables.iter().enumerate() {
        let row = truth.row(i);
        let curve = truncation_rmse_curve(&row, &s_values)?;
        curves.push((p.to_string(), p.weight(), curve));
    }
    emit("truncation.csv", &|p| {
        let rows = curves.iter().flat_map(|(label, w, c)| {
            c.iter().map(move |&(s, rmse)| TruncRow {
                pauli: label,
                weight: *w,
                s,
                rmse,
            })
        });
        write_rows(p, &["pauli", "weight", "s", "rmse"], rows)
    })?;
    let mut sector: BTreeMap<usize, (usize, Vec<f64>)> = BTreeMap::new();
    for (_, w, c) in &curves {
        let e = sector.entry(*w).or_insert_with(|| (0, vec![0.0; n]));
        e.0 += 1;
        for (k, &(_, v)) in c.iter().enumerate() {
            e.1[k] += v;
        }
    }
    emit("truncation_sector.csv", &|p| {
        let rows = sector.iter().flat_map(|(w, (count, sums))| {
            let first = sums[0] / *count as f64;
            sums.iter().enumerate().map(move |(k, v)| {
                let mean = v / *count as f64;
                TruncSectorRow {
                    weight: *w,
                    s: k + 1,
                    observables: *count,
                    mean_rmse: mean,
                    relative: mean / first,
                }
            })
        });
        write_rows(p, &["weight", "s", "observables", "mean_rmse", "relative"], rows)
    })?;

    let parsed: Vec<Vec<csst_core::metrics::ObservableReport>> = cells
        .iter()
        .map(|c| {
            c.reports
                .iter()
                .map(|r| r.to_report())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| ExpError::data(dir, e))
        })
        .collect::<Result<_>>()?;
    let summaries: Vec<_> = parsed.iter().map(|r| aggregate_by_weight(r)).collect();

    // baseline error per shot count (independent of m; first mask used)
    emit("baseline.csv", &|p| {
        let mut rows = Vec::new();
        let mut seen = Vec::new();
        for (c, s) in cells.iter().zip(&summaries) {
            if seen.contains(&c.n_st) {
                continue;
            }
            seen.push(c.n_st);
            for w in s {
                rows.push(BaselineRow {
                    n_st: c.n_st,
                    weight: w.weight,
                    kept: w.kept,
                    mean_rmse_st: w.rmse_st.map(|v| v.mean),
                    std_rmse_st: w.rmse_st.map(|v| v.std),
                });
            }
        }
        write_rows(p, &["n_st", "weight", "kept", "mean_rmse_st", "std_rmse_st"], rows)
    })?;

    let sectors: Vec<BTreeMap<usize, SectorErrors>> = cells.iter().map(|c| sector_errors(&c.reports)).collect();
    emit("srf.csv", &|p| {
        let mut rows = Vec::new();
        for ((c, s), sec) in cells.iter().zip(&summaries).zip(&sectors) {
            for w in s {
                let e = sec.get(&w.weight);
                rows.push(SrfRow {
                    n_st: c.n_st,
                    m: c.m,
                    weight: w.weight,
                    kept: w.kept,
                    mean_rmse_st: e.map(|e| e.rmse_st),
                    mean_rmse_cs: e.map(|e| e.rmse_cs),
                    ratio: e.map(|e| e.ratio()),
                    srf_sector: e.and_then(|e| e.srf(n, c.m)),
                    srf_mean: w.srf.map(|v: MeanStd| v.mean),
                    n_over_m: n as f64 / c.m as f64,
                });
            }
        }
        write_rows(
            p,
            &[
                "n_st", "m", "weight", "kept", "mean_rmse_st", "mean_rmse_cs", "ratio", "srf_sector", "srf_mean", "n_over_m",
            ],
            rows,
        )
    })?;

    emit("alpha_star.csv", &|p| {
        let rows = cells.iter().zip(&summaries).flat_map(|(c, s)| {
            s.iter().map(move |w| AlphaStarRow {
                n_st: c.n_st,
                m: c.m,
                weight: w.weight,
                kept: w.kept,
                mean: w.alpha_star.map(|v| v.mean),
                std: w.alpha_star.map(|v| v.std),
            })
        });
        write_rows(p, &["n_st", "m", "weight", "kept", "mean", "std"], rows)
    })?;

    emit("rmse_vs_alpha.csv", &|p| {
        let mut rows = Vec::new();
        for c in cells {
            let kept: HashMap<&str, bool> = c.reports.iter().map(|r| (r.pauli.as_str(), r.status == "kept")).collect();
            let mut acc: BTreeMap<usize, Vec<(f64, f64, usize)>> = BTreeMap::new();
            let mut pos: HashMap<&str, usize> = HashMap::new();
            for r in &c.sweeps {
                let k = pos.entry(r.pauli.as_str()).or_insert(0);
                let slot = *k;
                *k += 1;
                if !kept.get(r.pauli.as_str()).copied().unwrap_or(false) {
                    continue;
                }
                let v = acc.entry(r.weight).or_default();
                if v.len() <= slot {
                    v.resize(slot + 1, (r.alpha, 0.0, 0));
                }
                v[slot].1 += r.rmse;
                v[slot].2 += 1;
            }
            for (w, v) in acc {
                for (alpha, sum, count) in v {
                    rows.push(AlphaCurveRow {
                        n_st: c.n_st,
                        m: c.m,
                        weight: w,
                        alpha,
                        mean_rmse: sum / count as f64,
                    });
                }
            }
        }
        write_rows(p, &["n_st", "m", "weight", "alpha", "mean_rmse"], rows)
    })?;

    // smallest m whose sector-mean best-alpha error beats the baseline
    emit("mstar.csv", &|p| {
        let mut best: BTreeMap<(usize, usize), Option<usize>> = BTreeMap::new();
        for (c, sec) in cells.iter().zip(&sectors) {
            for (&w, e) in sec {
                let slot = best.entry((c.n_st, w)).or_insert(None);
                if e.rmse_cs <= e.rmse_st && slot.is_none_or(|m| c.m < m) {
                    *slot = Some(c.m);
                }
            }
        }
        let rows = best.into_iter().map(|((n_st, weight), m_star)| MStarRow { n_st, weight, m_star });
        write_rows(p, &["n_st", "weight", "m_star"], rows)
    })?;

    emit("scatter.csv", &|p| {
        let rows = cells.iter().flat_map(|c| {
            c.reports.iter().filter(|r| r.status == "kept").map(move |r| ScatterRow {
                n_st: c.n_st,
                m: c.m,
                pauli: &r.pauli,
                weight: r.weight,
                rmse_st: r.rmse_st,
                rmse_cs_best: r.rmse_cs_best,
            })
        });
        write_rows(p, &["n_st", "m", "pauli", "weight", "rmse_st", "rmse_cs_best"], rows)
    })?;

    Ok(written)
}
