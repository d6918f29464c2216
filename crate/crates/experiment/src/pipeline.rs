//! Stage runners behind the CLI: simulate, shadows, reconstruct, sweep, report.
//!
//! Every stage directory carries a `stamp.json` with the config hash and the
//! files it produced; a stage whose stamp matches is loaded instead of rerun.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use csst_core::io::{read_signal_csv, read_states, write_states};
use csst_core::lindblad::{evolve_grid, signal_matrix, SignalMatrix};
use csst_core::metrics::{classify, rmse, snr_db, FilterStatus, ObservableReport};
use csst_core::recovery::{alpha_sweep, LassoConfig};
use csst_core::shadow::{sample_snapshots_at, PauliMoments, ShadowDataset};
use csst_core::transform::{sample_mask, MeasurementOperator};
use csst_core::{initial_state, CsstError, DensityMatrix, PauliString, SamplingPlan};
use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{ExpError, Result};
use crate::manifest::RunManifest;
use crate::output::{read_rows, write_json, write_matrix, write_rows};

const STAMP: &str = "stamp.json";

#[derive(Debug, Serialize, Deserialize)]
struct Stamp {
    config_hash: String,
    files: Vec<String>,
}

pub struct Truth {
    pub states: Vec<DensityMatrix>,
    pub signal: SignalMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelSidecar {
    n: usize,
    lattice: [usize; 2],
    model: crate::config::ModelConfig,
    initial_state: csst_core::InitialState,
    #[serde(rename = "N")]
    n_steps: usize,
    dt: f64,
    observables: usize,
    w_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub pauli: String,
    pub weight: usize,
    pub status: String,
    pub rmse_st: f64,
    pub rmse_cs_best: f64,
    pub alpha_star: f64,
    pub ratio: Option<f64>,
    pub snr_db: f64,
    pub srf: Option<f64>,
}

impl From<&ObservableReport> for ReportRow {
    fn from(r: &ObservableReport) -> Self {
        ReportRow {
            pauli: r.pauli.to_string(),
            weight: r.weight,
            status: r.filtered.as_str().into(),
            rmse_st: r.rmse_st,
            rmse_cs_best: r.rmse_cs_best,
            alpha_star: r.alpha_star,
            ratio: r.ratio,
            snr_db: r.snr_db,
            srf: r.srf,
        }
    }
}

impl ReportRow {
    pub const HEADER: &'static [&'static str] = &[
        "pauli", "weight", "status", "rmse_st", "rmse_cs_best", "alpha_star", "ratio", "snr_db", "srf",
    ];

    pub fn to_report(&self) -> std::result::Result<ObservableReport, String> {
        let filtered = match self.status.as_str() {
            "kept" => FilterStatus::Kept,
            "variance-filtered" => FilterStatus::VarianceFiltered,
            "snr-filtered" => FilterStatus::SnrFiltered,
            other => return Err(format!("unknown status {other:?}")),
        };
        Ok(ObservableReport {
            pauli: self.pauli.parse().map_err(|e: CsstError| e.to_string())?,
            weight: self.weight,
            rmse_st: self.rmse_st,
            rmse_cs_best: self.rmse_cs_best,
            alpha_star: self.alpha_star,
            ratio: self.ratio,
            snr_db: self.snr_db,
            srf: self.srf,
            filtered,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub pauli: String,
    pub weight: usize,
    pub alpha: f64,
    pub rmse: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SkipRow {
    pauli: String,
    weight: usize,
    reason: String,
    detail: String,
}

impl SkipRow {
    const HEADER: &'static [&'static str] = &["pauli", "weight", "reason", "detail"];
}

impl SweepRow {
    pub const HEADER: &'static [&'static str] = &["pauli", "weight", "alpha", "rmse", "iterations", "converged"];
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellSummary {
    pub n_st: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub n_steps: usize,
    pub observables: usize,
    pub solver_failures: usize,
    pub weights: Vec<csst_core::metrics::WeightSummary>,
}

/// Everything one (N_ST, m) cell produces, in observable order.
pub struct CellResult {
    pub plan: SamplingPlan,
    pub reports: Vec<ObservableReport>,
    pub sweeps: Vec<SweepRow>,
    pub reconstructions: Vec<(PauliString, Vec<f64>)>,
    pub coefficients: Vec<(PauliString, Vec<f64>)>,
    skipped: Vec<SkipRow>,
    pub summary: CellSummary,
}

pub fn cell_dir_name(n_st: usize, m: usize) -> String {
    format!("nst{n_st}_m{m}")
}

pub struct Pipeline {
    pub cfg: ExperimentConfig,
    pub out: PathBuf,
    hash: String,
    manifest: RunManifest,
}

fn rel(out: &Path, p: &Path) -> String {
    p.strip_prefix(out).unwrap_or(p).to_string_lossy().replace('\\', "/")
}

fn mkdir(p: &Path) -> Result<()> {
    fs::create_dir_all(p).map_err(|e| ExpError::io(p, e))
}

impl Pipeline {
    pub fn new(cfg: ExperimentConfig, out: PathBuf) -> Result<Self> {
        cfg.validate()?;
        mkdir(&out)?;
        let hash = cfg.hash();
        let manifest = RunManifest::load_or_new(&out, &hash, cfg.seed);
        let p = Pipeline {
            cfg,
            out,
            hash,
            manifest,
        };
        let cfg_path = p.out.join("config.json");
        write_json(&cfg_path, &p.cfg)?;
        Ok(p)
    }

    pub fn config_hash(&self) -> &str {
        &self.hash
    }

    fn stamped(&self, dir: &Path) -> Option<Vec<String>> {
        let text = fs::read_to_string(dir.join(STAMP)).ok()?;
        let stamp: Stamp = serde_json::from_str(&text).ok()?;
        (stamp.config_hash == self.hash && stamp.files.iter().all(|f| self.out.join(f).is_file())).then_some(stamp.files)
    }

    fn stamp(&self, dir: &Path, files: &[String]) -> Result<String> {
        let path = dir.join(STAMP);
        write_json(
            &path,
            &Stamp {
                config_hash: self.hash.clone(),
                files: files.to_vec(),
            },
        )?;
        Ok(rel(&self.out, &path))
    }

    fn finish(&mut self, stage: &str, started: Instant, files: Vec<String>) -> Result<()> {
        let mut files = files;
        files.push("config.json".into());
        self.manifest.record(stage, started.elapsed().as_secs_f64(), files);
        self.manifest.write(&self.out)
    }

    fn truth_dir(&self) -> PathBuf {
        self.out.join("truth")
    }

    pub fn plan(&self, m: usize) -> Result<SamplingPlan> {
        Ok(sample_mask(self.cfg.grid.n_steps, m, self.cfg.seed)?)
    }

    /// Ground truth states and signal matrix, computed once per config.
    pub fn truth(&self) -> Result<(Truth, Vec<String>)> {
        let dir = self.truth_dir();
        let grid = self.cfg.time_grid()?;
        if let Some(files) = self.stamped(&dir) {
            let states = self.load_states()?;
            let s_path = dir.join("S.csv");
            let file = fs::File::open(&s_path).map_err(|e| ExpError::io(&s_path, e))?;
            let (obs, values) = read_signal_csv(file)?;
            let signal = SignalMatrix::new(values, obs, grid)?;
            return Ok((Truth { states, signal }, files));
        }
        mkdir(&dir)?;
        let model = self.cfg.build_model()?;
        let rho0 = initial_state(&self.cfg.initial_state, self.cfg.num_qubits())?;
        let states = evolve_grid(&model, &rho0, &grid)?;
        let observables = self.cfg.observables()?;
        let signal = signal_matrix(&states, &observables, grid)?;

        let mut files = Vec::new();
        let s_path = dir.join("S.csv");
        let labels: Vec<String> = observables.iter().map(|p| p.to_string()).collect();
        write_matrix(&s_path, "pauli", "t_", 1, &labels, &signal.values)?;
        files.push(rel(&self.out, &s_path));
        let st_path = dir.join("states.bin");
        let f = fs::File::create(&st_path).map_err(|e| ExpError::io(&st_path, e))?;
        write_states(std::io::BufWriter::new(f), &states)?;
        files.push(rel(&self.out, &st_path));
        let side = dir.join("model.json");
        write_json(
            &side,
            &ModelSidecar {
                n: self.cfg.num_qubits(),
                lattice: [self.cfg.model.rows, self.cfg.model.cols],
                model: self.cfg.model.clone(),
                initial_state: self.cfg.initial_state.clone(),
                n_steps: grid.n_steps,
                dt: grid.dt,
                observables: observables.len(),
                w_max: self.cfg.w_max,
            },
        )?;
        files.push(rel(&self.out, &side));
        files.push(self.stamp(&dir, &files)?);
        Ok((Truth { states, signal }, files))
    }

    fn load_states(&self) -> Result<Vec<DensityMatrix>> {
        let path = self.truth_dir().join("states.bin");
        let f = fs::File::open(&path).map_err(|e| ExpError::io(&path, e))?;
        Ok(read_states(std::io::BufReader::new(f))?)
    }

    fn estimates_path(&self, n_st: usize) -> PathBuf {
        self.out.join("shadows").join(format!("nst{n_st}")).join("estimates.csv")
    }

    /// Baseline estimate matrices (M x N, every timestep) for each shot count.
    pub fn estimates(&self, truth: &Truth, shots: &[usize]) -> Result<(Vec<Array2<f64>>, Vec<String>)> {
        let mut out: Vec<Option<Array2<f64>>> = vec![None; shots.len()];
        let mut files = Vec::new();
        let mut missing = Vec::new();
        for (k, &n_st) in shots.iter().enumerate() {
            let path = self.estimates_path(n_st);
            match self.stamped(path.parent().unwrap()) {
                Some(f) => {
                    let file = fs::File::open(&path).map_err(|e| ExpError::io(&path, e))?;
                    out[k] = Some(read_signal_csv(file)?.1);
                    files.extend(f);
                }
                None => missing.push(k),
            }
        }
        if !missing.is_empty() {
            let wanted: Vec<usize> = missing.iter().map(|&k| shots[k]).collect();
            let computed = baseline_estimates(&truth.states, &truth.signal.observables, &wanted, self.cfg.seed)?;
            let labels: Vec<String> = truth.signal.observables.iter().map(|p| p.to_string()).collect();
            for (&k, est) in missing.iter().zip(computed) {
                let path = self.estimates_path(shots[k]);
                let dir = path.parent().unwrap().to_path_buf();
                mkdir(&dir)?;
                write_matrix(&path, "pauli", "t_", 1, &labels, &est)?;
                let mut f = vec![rel(&self.out, &path)];
                f.push(self.stamp(&dir, &f)?);
                files.extend(f);
                out[k] = Some(est);
            }
        }
        Ok((out.into_iter().map(Option::unwrap).collect(), files))
    }

    pub fn cmd_simulate(&mut self) -> Result<()> {
        let t0 = Instant::now();
        let (_, files) = self.truth()?;
        self.finish("simulate", t0, files)
    }

    fn shadows_dir(&self, n_st: usize, m: usize) -> PathBuf {
        self.out.join("shadows").join(cell_dir_name(n_st, m))
    }

    /// Snapshot datasets at the sampled timesteps and their M x m estimates.
    pub fn cmd_shadows(&mut self, n_st: usize, m: usize) -> Result<()> {
        let t0 = Instant::now();
        let (truth, _) = self.truth()?;
        let states = truth.states;
        if states.len() != self.cfg.grid.n_steps {
            return Err(ExpError::data(self.truth_dir().join("states.bin"), "state count does not match the grid"));
        }
        let observables = truth.signal.observables;
        let plan = self.plan(m)?;
        let dir = self.shadows_dir(n_st, m);
        let ds_dir = dir.join("datasets");
        mkdir(&ds_dir)?;
        let seed = self.cfg.seed;
        let per_step: Vec<(ShadowDataset, Vec<f64>)> = plan
            .omega()
            .par_iter()
            .map(|&j| {
                let ds = sample_snapshots_at(&states[j], n_st, seed, j)?;
                let table = PauliMoments::from_dataset(&ds)?;
                let col = observables.iter().map(|p| table.estimate(p)).collect();
                Ok((ds, col))
            })
            .collect::<std::result::Result<_, CsstError>>()?;
        let mut files = Vec::new();
        let mut est = Array2::zeros((observables.len(), m));
        for (c, ((ds, col), &j)) in per_step.iter().zip(plan.omega()).enumerate() {
            let path = ds_dir.join(format!("t{:05}.txt", j + 1));
            fs::write(&path, ds.to_text()).map_err(|e| ExpError::io(&path, e))?;
            files.push(rel(&self.out, &path));
            for (i, v) in col.iter().enumerate() {
                est[[i, c]] = *v;
            }
        }
        let plan_path = dir.join("plan.json");
        write_json(&plan_path, &plan)?;
        files.push(rel(&self.out, &plan_path));
        let est_path = dir.join("estimates.csv");
        let labels: Vec<String> = observables.iter().map(|p| p.to_string()).collect();
        let headers: Vec<String> = plan.omega().iter().map(|j| format!("t_{}", j + 1)).collect();
        crate::output::write_matrix_named(&est_path, "pauli", &headers, &labels, &est)?;
        files.push(rel(&self.out, &est_path));
        self.finish("shadows", t0, files)
    }

    /// Reconstructs every observable from the files written by `cmd_shadows`.
    pub fn cmd_reconstruct(&mut self, n_st: usize, m: usize) -> Result<()> {
        let t0 = Instant::now();
        let dir = self.shadows_dir(n_st, m);
        let plan_path = dir.join("plan.json");
        let text = fs::read_to_string(&plan_path).map_err(|e| ExpError::io(&plan_path, e))?;
        let plan: SamplingPlan = serde_json::from_str(&text).map_err(|e| ExpError::data(&plan_path, e))?;
        let est_path = dir.join("estimates.csv");
        let file = fs::File::open(&est_path).map_err(|e| ExpError::io(&est_path, e))?;
        let (_, sampled) = read_signal_csv(file)?;
        let (truth, mut files) = self.truth()?;
        if sampled.dim() != (truth.signal.observables.len(), plan.m()) || plan.len_full() != self.cfg.grid.n_steps {
            return Err(ExpError::data(&est_path, "estimates do not match the plan and observable family"));
        }
        let (mut base, f) = self.estimates(&truth, &[n_st])?;
        files.extend(f);
        let cell = run_cell(&self.cfg, &truth.signal, &base.remove(0), &sampled, plan, n_st)?;
        files.extend(self.write_cell(&cell)?);
        self.finish("reconstruct", t0, files)
    }

    fn cell_dir(&self, n_st: usize, m: usize) -> PathBuf {
        self.out.join("cells").join(cell_dir_name(n_st, m))
    }

    fn write_cell(&self, cell: &CellResult) -> Result<Vec<String>> {
        let dir = self.cell_dir(cell.summary.n_st, cell.summary.m);
        mkdir(&dir)?;
        let mut files = Vec::new();
        let mut push = |p: PathBuf| files.push(rel(&self.out, &p));

        let p = dir.join("plan.json");
        write_json(&p, &cell.plan)?;
        push(p);
        let p = dir.join("reports.csv");
        write_rows(&p, ReportRow::HEADER, cell.reports.iter().map(ReportRow::from))?;
        push(p);
        let p = dir.join("alpha_sweep.csv");
        write_rows(&p, SweepRow::HEADER, cell.sweeps.iter().cloned())?;
        push(p);
        let p = dir.join("skipped.csv");
        write_rows(&p, SkipRow::HEADER, cell.skipped.iter().cloned())?;
        push(p);
        for (name, prefix, data) in [
            ("reconstructions.csv", "t_", &cell.reconstructions),
            ("coefficients.csv", "k_", &cell.coefficients),
        ] {
            let p = dir.join(name);
            let labels: Vec<String> = data.iter().map(|(q, _)| q.to_string()).collect();
            let n = self.cfg.grid.n_steps;
            let flat: Vec<f64> = data.iter().flat_map(|(_, v)| v.iter().copied()).collect();
            let mat = Array2::from_shape_vec((data.len(), n), flat).expect("rows have length N");
            write_matrix(&p, "pauli", prefix, 1, &labels, &mat)?;
            push(p);
        }
        let p = dir.join("summary.json");
        write_json(&p, &cell.summary)?;
        push(p);
        files.push(self.stamp(&dir, &files)?);
        Ok(files)
    }

    /// Full (N_ST x m) grid. Cells with a matching stamp are skipped.
    pub fn cmd_sweep(&mut self) -> Result<()> {
        let t0 = Instant::now();
        let (truth, mut files) = self.truth()?;
        let shots = self.cfg.shots.clone();
        let (estimates, f) = self.estimates(&truth, &shots)?;
        files.extend(f);
        let mut pending = Vec::new();
        for (k, &n_st) in shots.iter().enumerate() {
            for &m in &self.cfg.masks {
                match self.stamped(&self.cell_dir(n_st, m)) {
                    Some(f) => files.extend(f),
                    None => pending.push((k, n_st, m)),
                }
            }
        }
        let written: Vec<Vec<String>> = pending
            .par_iter()
            .map(|&(k, n_st, m)| {
                let plan = self.plan(m)?;
                let base = &estimates[k];
                let sampled = base.select(ndarray::Axis(1), plan.omega());
                let cell = run_cell(&self.cfg, &truth.signal, base, &sampled, plan, n_st)?;
                self.write_cell(&cell)
            })
            .collect::<Result<_>>()?;
        files.extend(written.into_iter().flatten());
        self.finish("sweep", t0, files)?;
        self.cmd_report()
    }

    /// Figure tables aggregated from the truth and all cell outputs.
    pub fn cmd_report(&mut self) -> Result<()> {
        let t0 = Instant::now();
        let (truth, _) = self.truth()?;
        let mut cells = Vec::new();
        for &n_st in &self.cfg.shots {
            for &m in &self.cfg.masks {
                let dir = self.cell_dir(n_st, m);
                if self.stamped(&dir).is_none() {
                    return Err(ExpError::data(&dir, "cell output missing or stale; run the sweep first"));
                }
                let reports: Vec<ReportRow> = read_rows(&dir.join("reports.csv"))?;
                let sweeps: Vec<SweepRow> = read_rows(&dir.join("alpha_sweep.csv"))?;
                cells.push(crate::report::CellData { n_st, m, reports, sweeps });
            }
        }
        let fig_dir = self.out.join("figures");
        mkdir(&fig_dir)?;
        let written = crate::report::write_figures(&self.cfg, &truth.signal, &cells, &fig_dir)?;
        let files = written.iter().map(|p| rel(&self.out, p)).collect();
        self.finish("report", t0, files)
    }

    pub fn cmd_theory(&mut self) -> Result<Vec<crate::theory::TheoryRow>> {
        let t0 = Instant::now();
        let rows = crate::theory::theory_rows(&self.cfg)?;
        let p = self.out.join("theory.csv");
        write_rows(&p, crate::theory::TheoryRow::HEADER, rows.iter().cloned())?;
        self.finish("theory", t0, vec![rel(&self.out, &p)])?;
        Ok(rows)
    }
}

/// Estimates of every observable at every timestep for each shot count.
///
/// One stream per timestep; smaller shot counts use a prefix of the same
/// snapshots, so the datasets are nested.
pub fn baseline_estimates(
    states: &[DensityMatrix],
    observables: &[PauliString],
    shots: &[usize],
    seed: u64,
) -> Result<Vec<Array2<f64>>> {
    let max = *shots.iter().max().ok_or_else(|| ExpError::Config("no shot counts".into()))?;
    let columns: Vec<Vec<Vec<f64>>> = states
        .par_iter()
        .enumerate()
        .map(|(j, rho)| {
            let full = sample_snapshots_at(rho, max, seed, j)?;
            shots
                .iter()
                .map(|&k| {
                    let ds = ShadowDataset {
                        snapshots: full.snapshots[..k].to_vec(),
                        ..full.clone()
                    };
                    let table = PauliMoments::from_dataset(&ds)?;
                    Ok(observables.iter().map(|p| table.estimate(p)).collect())
                })
                .collect::<std::result::Result<Vec<_>, CsstError>>()
        })
        .collect::<std::result::Result<_, CsstError>>()?;
    Ok((0..shots.len())
        .map(|k| Array2::from_shape_fn((observables.len(), states.len()), |(i, j)| columns[j][k][i]))
        .collect())
}

/// Filters, alpha sweep and best-alpha reconstruction for one cell.
///
/// `sampled` holds the M x m estimates at the plan's timesteps; `baseline`
/// the M x N estimates at every timestep with the same shot count.
pub fn run_cell(
    cfg: &ExperimentConfig,
    truth: &SignalMatrix,
    baseline: &Array2<f64>,
    sampled: &Array2<f64>,
    plan: SamplingPlan,
    n_st: usize,
) -> Result<CellResult> {
    let n = cfg.grid.n_steps;
    let m = plan.m();
    let op = MeasurementOperator::<f64>::dct(plan.clone())?;
    let grid = cfg.alpha_grid()?;
    let base_cfg = LassoConfig {
        tol: cfg.lasso.tol,
        max_iters: cfg.lasso.max_iters,
        ..LassoConfig::new(0.0)
    };
    type PerObs = std::result::Result<(ObservableReport, Vec<SweepRow>, Vec<f64>, Vec<f64>), SkipRow>;
    let per_obs: Vec<PerObs> = truth
        .observables
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let s = truth.row(i);
            let b = baseline.row(i).to_vec();
            let y = sampled.row(i).to_vec();
            let fail = |reason: &str, e: CsstError| SkipRow {
                pauli: p.to_string(),
                weight: p.weight(),
                reason: reason.into(),
                detail: e.to_string(),
            };
            let rmse_st = rmse(&s, &b).map_err(|e| fail("invalid-input", e))?;
            let snr = match snr_db(&s, &b) {
                Ok(v) => v,
                Err(CsstError::UndefinedSignal) => f64::NAN,
                Err(e) => return Err(fail("invalid-input", e)),
            };
            let status = classify(&s, &b, cfg.filters.variance, cfg.filters.snr_db).map_err(|e| fail("invalid-input", e))?;
            let sweep = alpha_sweep(&op, &y, &grid, Some(&s), &base_cfg).map_err(|e| fail("solver-error", e))?;
            let best = sweep.best_entry().expect("truth supplied");
            let report = ObservableReport::new(
                *p,
                n,
                m,
                rmse_st,
                best.rmse.unwrap(),
                best.alpha,
                snr,
                status,
            )
            .map_err(|e| fail("invalid-input", e))?;
            let rows = sweep
                .entries
                .iter()
                .map(|e| SweepRow {
                    pauli: p.to_string(),
                    weight: p.weight(),
                    alpha: e.alpha,
                    rmse: e.rmse.unwrap(),
                    iterations: e.result.iterations,
                    converged: e.result.converged,
                })
                .collect();
            Ok((report, rows, best.result.signal.clone(), best.result.coefficients.clone()))
        })
        .collect();

    let mut reports = Vec::new();
    let mut sweeps = Vec::new();
    let mut reconstructions = Vec::new();
    let mut coefficients = Vec::new();
    let mut skipped = Vec::new();
    let mut failures = 0;
    for r in per_obs {
        match r {
            Ok((report, rows, sig, coef)) => {
                if report.filtered != FilterStatus::Kept {
                    let detail = match report.filtered {
                        FilterStatus::VarianceFiltered => format!("variance below {}", cfg.filters.variance),
                        _ => format!("baseline SNR {:.3} dB below {} dB", report.snr_db, cfg.filters.snr_db),
                    };
                    skipped.push(SkipRow {
                        pauli: report.pauli.to_string(),
                        weight: report.weight,
                        reason: report.filtered.as_str().into(),
                        detail,
                    });
                }
                sweeps.extend(rows);
                reconstructions.push((report.pauli, sig));
                coefficients.push((report.pauli, coef));
                reports.push(report);
            }
            Err(skip) => {
                failures += 1;
                skipped.push(skip);
            }
        }
    }
    let summary = CellSummary {
        n_st,
        m,
        n_steps: n,
        observables: truth.observables.len(),
        solver_failures: failures,
        weights: csst_core::metrics::aggregate_by_weight(&reports),
    };
    Ok(CellResult {
        plan,
        reports,
        sweeps,
        reconstructions,
        coefficients,
        skipped,
        summary,
    })
}
