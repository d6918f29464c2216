use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use csst_core::lindblad::{
    build_heisenberg, evolve_grid, modal_expansion, standard_dissipator, vectorize_lindbladian, Jump, LindbladModel,
    TimeGrid,
};
use csst_core::recovery::{dct_envelope_bound, lasso_cd, reconstruct_signal, LassoConfig};
use csst_core::shadow::{bernstein_shots, mom_shots, sample_snapshots, single_shot_value};
use csst_core::transform::{sample_mask, subsample, top_s_truncate, Basis, MeasurementOperator};
use csst_core::{enumerate_paulis, expectation, initial_state, DensityMatrix, InitialState, PauliString, SamplingPlan};
use csst_experiment::pipeline::ReportRow;
use csst_experiment::{ExperimentConfig, Pipeline, Profile};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// Orthonormal DCT-II by the direct sum, independent of the library table.
fn dct_direct(s: &[f64]) -> Vec<f64> {
    let n = s.len();
    let nf = n as f64;
    (0..n)
        .map(|k| {
            let c = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
            c * s
                .iter()
                .enumerate()
                .map(|(j, v)| v * (PI * (j as f64 + 0.5) * k as f64 / nf).cos())
                .sum::<f64>()
        })
        .collect()
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn observable_count() -> Check {
    let got = enumerate_paulis(6, 4).map_err(e2s)?.len();
    let oracle: u64 = (1..=4).map(|w| binom(6, w) * 3u64.pow(w as u32)).sum();
    ensure(got == 1908 && oracle == 1908, || format!("got {got}, oracle {oracle}"))?;
    Ok(format!("M = {got}"))
}

fn sample_complexity() -> Check {
    let b = bernstein_shots(4, 1e-2, 1e-2, 1908).map_err(e2s)?;
    let (mom, k) = mom_shots(4, 1e-2, 1e-2, 1908).map_err(e2s)?;
    ensure((19_000_000..=22_000_000).contains(&b), || format!("bernstein {b}"))?;
    ensure((290_000_000..=330_000_000).contains(&mom), || format!("mom {mom}"))?;
    Ok(format!("bernstein {b:.3e}, mom {mom:.3e} (K={k})", b = b as f64, mom = mom as f64))
}

fn transform_exactness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = 0.0f64;
    for n in [1usize, 2, 8, 64, 1000] {
        let basis = Basis::<f64>::dct(n).map_err(e2s)?;
        let f = Array2::from_shape_fn((n, n), |(k, j)| basis.entry(k, j));
        // plain loops: the real gemm of some OpenBLAS builds is not trustworthy
        let mut defect = 0.0f64;
        for r in 0..n {
            let fr = f.row(r);
            for c in r..n {
                let v: f64 = fr.iter().zip(f.row(c).iter()).map(|(a, b)| a * b).sum();
                defect = defect.max((v - if r == c { 1.0 } else { 0.0 }).abs());
            }
        }
        ensure(defect <= 1e-12, || format!("N={n}: |FF^T - I|_max = {defect:e}"))?;
        worst = worst.max(defect);

        let s: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = basis.forward(&s).map_err(e2s)?;
        let e_s: f64 = s.iter().map(|v| v * v).sum();
        let e_x: f64 = x.iter().map(|v| v * v).sum();
        ensure((e_s - e_x).abs() <= 1e-12 * e_s.max(1.0), || format!("N={n}: Parseval {e_s} vs {e_x}"))?;
        for s_keep in [1, n / 3 + 1, n] {
            let xs = top_s_truncate(&x, s_keep).map_err(e2s)?;
            let back = basis.inverse(&xs).map_err(e2s)?;
            let signal_rmse = (s.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n as f64).sqrt();
            let coeff_rmse = (x.iter().zip(&xs).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / n as f64).sqrt();
            ensure((signal_rmse - coeff_rmse).abs() <= 1e-12, || {
                format!("N={n}, s={s_keep}: {signal_rmse} vs {coeff_rmse}")
            })?;
        }
    }
    Ok(format!("max |FF^T - I| = {worst:.1e}"))
}

fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let d = 1 << n;
    let g = Array2::from_shape_fn((d, d), |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let mut rho = g.dot(&g.t().mapv(|v| v.conj()));
    let tr: Complex64 = rho.diag().sum();
    rho.mapv_inplace(|v| v / tr);
    DensityMatrix::new(rho).expect("valid density matrix")
}

fn shadow_statistics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let shots = 100_000;
    let mut worst_bias = 0.0f64;
    let mut worst_freq = 0.0f64;
    for trial in 0..10 {
        let n = 1 + trial % 2;
        let rho = random_density(&mut rng, n);
        let ds = sample_snapshots(&rho, shots, 500 + trial as u64).map_err(e2s)?;
        for p in enumerate_paulis(n, n).map_err(e2s)? {
            let w = p.weight() as i32;
            let mag = 3f64.powi(w);
            let vals: Vec<f64> = ds.snapshots.iter().map(|s| single_shot_value(s, &p)).collect();
            ensure(vals.iter().all(|&v| v == 0.0 || v == mag || v == -mag), || format!("{p}: value outside {{0, +-3^w}}"))?;
            let q = 3f64.powi(-w);
            let hits = vals.iter().filter(|v| **v != 0.0).count() as f64;
            let sigma = (q * (1.0 - q) / shots as f64).sqrt();
            let z_freq = (hits / shots as f64 - q).abs() / sigma;
            ensure(z_freq <= 5.0, || format!("{p}: match frequency off by {z_freq:.2} sigma"))?;
            let mean = vals.iter().sum::<f64>() / shots as f64;
            let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (shots as f64 - 1.0);
            let se = (var / shots as f64).sqrt();
            let exact = expectation(&p, &rho).map_err(e2s)?;
            let z_bias = (mean - exact).abs() / se;
            ensure(z_bias <= 5.0, || format!("{p}: bias {z_bias:.2} standard errors"))?;
            worst_bias = worst_bias.max(z_bias);
            worst_freq = worst_freq.max(z_freq);
        }
    }
    Ok(format!("worst bias {worst_bias:.2} SE, worst frequency {worst_freq:.2} sigma"))
}

fn random_model(rng: &mut ChaCha8Rng) -> LindbladModel {
    let d = 4;
    let raw = Array2::from_shape_fn((d, d), |_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h = Array2::from_shape_fn((d, d), |(r, c)| (raw[[r, c]] + raw[[c, r]].conj()) * 0.5);
    let jumps = (0..2)
        .map(|_| Jump {
            operator: Array2::from_shape_fn((d, d), |_| {
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            }),
            rate: rng.random_range(0.01..0.3),
        })
        .collect();
    LindbladModel::new(2, h, jumps).expect("valid model")
}

fn lindblad_correctness() -> Check {
    let grid = TimeGrid::new(256, 0.05).map_err(e2s)?;
    let mut trace_dev = 0.0f64;

    let g = 0.3;
    let deph = LindbladModel::new(1, Array2::zeros((2, 2)), standard_dissipator(1, g, 0.0).map_err(e2s)?).map_err(e2s)?;
    let plus = initial_state(&InitialState::PlusMinusProduct, 1).map_err(e2s)?;
    let x: PauliString = "X".parse().map_err(e2s)?;
    let mut worst = 0.0f64;
    for (j, rho) in evolve_grid(&deph, &plus, &grid).map_err(e2s)?.iter().enumerate() {
        trace_dev = trace_dev.max((rho.trace() - 1.0).abs());
        worst = worst.max((expectation(&x, rho).map_err(e2s)? - (-2.0 * g * grid.time(j)).exp()).abs());
    }
    ensure(worst <= 1e-7, || format!("dephasing <X> off by {worst:e}"))?;

    let damp = LindbladModel::new(1, Array2::zeros((2, 2)), standard_dissipator(1, 0.0, g).map_err(e2s)?).map_err(e2s)?;
    let one = initial_state(&InitialState::ComputationalBitstring { bits: "1".into() }, 1).map_err(e2s)?;
    let z: PauliString = "Z".parse().map_err(e2s)?;
    let mut worst_d = 0.0f64;
    for (j, rho) in evolve_grid(&damp, &one, &grid).map_err(e2s)?.iter().enumerate() {
        trace_dev = trace_dev.max((rho.trace() - 1.0).abs());
        worst_d = worst_d.max((expectation(&z, rho).map_err(e2s)? - (1.0 - 2.0 * (-g * grid.time(j)).exp())).abs());
    }
    ensure(worst_d <= 1e-7, || format!("amplitude damping <Z> off by {worst_d:e}"))?;

    let heis = LindbladModel::new(3, build_heisenberg(1, 3, 1.0).map_err(e2s)?, standard_dissipator(3, 0.1, 0.1).map_err(e2s)?)
        .map_err(e2s)?;
    let rho3 = initial_state(&InitialState::PlusMinusProduct, 3).map_err(e2s)?;
    for rho in evolve_grid(&heis, &rho3, &grid).map_err(e2s)? {
        trace_dev = trace_dev.max((rho.trace() - 1.0).abs());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let short = TimeGrid::new(100, 0.05).map_err(e2s)?;
    let mut worst_modal = 0.0f64;
    for _ in 0..20 {
        let model = random_model(&mut rng);
        let rho0 = random_density(&mut rng, 2);
        let states = evolve_grid(&model, &rho0, &short).map_err(e2s)?;
        let l = vectorize_lindbladian(&model).map_err(e2s)?;
        for p in enumerate_paulis(2, 2).map_err(e2s)? {
            let dec = modal_expansion(&l, &rho0, &p).map_err(e2s)?;
            for (j, rho) in states.iter().enumerate() {
                trace_dev = trace_dev.max((rho.trace() - 1.0).abs());
                let d = (dec.evaluate(short.time(j)) - expectation(&p, rho).map_err(e2s)?).abs();
                worst_modal = worst_modal.max(d);
            }
        }
    }
    ensure(worst_modal <= 1e-7, || format!("modal vs grid {worst_modal:e}"))?;
    ensure(trace_dev <= 1e-9, || format!("trace deviation {trace_dev:e}"))?;
    Ok(format!(
        "trace {trace_dev:.1e}, dephasing {worst:.1e}, damping {worst_d:.1e}, modal {worst_modal:.1e}"
    ))
}

fn lasso_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let n = 48;
    let full = MeasurementOperator::<f64>::dct(SamplingPlan::full(n).map_err(e2s)?).map_err(e2s)?;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let alpha = 10f64.powf(rng.random_range(-6.0..-1.5));
        let res = lasso_cd(&full, &y, &LassoConfig::new(alpha), None).map_err(e2s)?;
        let fy = dct_direct(&y);
        let t = n as f64 * alpha;
        for (z, v) in res.coefficients.iter().zip(&fy) {
            let oracle = v.signum() * (v.abs() - t).max(0.0);
            worst = worst.max((z - oracle).abs());
        }
    }
    ensure(worst <= 1e-8, || format!("soft-threshold mismatch {worst:e}"))?;

    let plan = sample_mask(n, 20, 62).map_err(e2s)?;
    let op = MeasurementOperator::<f64>::dct(plan).map_err(e2s)?;
    let mut worst_kkt = 0.0f64;
    for trial in 0..20 {
        let y: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
        let aty = op.adjoint(&y).map_err(e2s)?;
        let alpha_max = aty.iter().fold(0.0f64, |a, v| a.max(v.abs())) / n as f64;
        let zero = lasso_cd(&op, &y, &LassoConfig::new(alpha_max * (1.0 + 1e-9)), None).map_err(e2s)?;
        ensure(zero.coefficients.iter().all(|v| *v == 0.0), || format!("trial {trial}: nonzero above alpha_max"))?;
        let below = lasso_cd(&op, &y, &LassoConfig::new(alpha_max * 0.9), None).map_err(e2s)?;
        ensure(below.coefficients.iter().any(|v| *v != 0.0), || format!("trial {trial}: zero below alpha_max"))?;

        let alpha = alpha_max * rng.random_range(0.01..0.5);
        let res = lasso_cd(&op, &y, &LassoConfig::new(alpha), None).map_err(e2s)?;
        ensure(res.converged, || format!("trial {trial}: not converged"))?;
        let az = op.apply(&res.coefficients).map_err(e2s)?;
        let r: Vec<f64> = az.iter().zip(&y).map(|(a, b)| a - b).collect();
        let grad = op.adjoint(&r).map_err(e2s)?;
        for (g, z) in grad.iter().zip(&res.coefficients) {
            let g = g / n as f64;
            let viol = if *z != 0.0 {
                (g + alpha * z.signum()).abs()
            } else {
                (g.abs() - alpha).max(0.0)
            };
            worst_kkt = worst_kkt.max(viol / alpha);
        }
    }
    ensure(worst_kkt <= 1e-5, || format!("relative KKT residual {worst_kkt:e}"))?;
    Ok(format!("soft-threshold {worst:.1e}, KKT {worst_kkt:.1e}"))
}

fn exact_sparse_recovery() -> Check {
    let (n, m, trials) = (128, 60, 50);
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let mut ok = 0;
    for t in 0..trials {
        let mut x = vec![0.0; n];
        let mut placed = 0;
        while placed < 3 {
            let k = rng.random_range(0..n);
            if x[k] == 0.0 {
                x[k] = if rng.random::<bool>() { 1.0 } else { -1.0 };
                placed += 1;
            }
        }
        // s = F^T x by the direct sum
        let nf = n as f64;
        let s: Vec<f64> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let c = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
                        c * x[k] * (PI * (j as f64 + 0.5) * k as f64 / nf).cos()
                    })
                    .sum()
            })
            .collect();
        let plan = sample_mask(n, m, 9000 + t).map_err(e2s)?;
        let samples = subsample(&plan, &s).map_err(e2s)?;
        let res = reconstruct_signal(&plan, &samples, 1e-8).map_err(e2s)?;
        let err = (s.iter().zip(&res.signal).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / nf).sqrt();
        if err <= 1e-6 {
            ok += 1;
        }
    }
    ensure(ok * 10 >= trials * 9, || format!("{ok}/{trials} recovered"))?;
    Ok(format!("{ok}/{trials} trials with RMSE <= 1e-6"))
}

fn envelope_bound() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(83);
    let mut params = vec![(0.1, 3.0, 0.05, 256usize, 0.7)];
    for _ in 0..20 {
        params.push((
            rng.random_range(0.01..1.0),
            rng.random_range(0.0..20.0),
            rng.random_range(0.005..0.2),
            rng.random_range(8..400),
            rng.random_range(0.0..2.0 * PI),
        ));
    }
    let mut tightest = f64::INFINITY;
    for (g, w, dt, n, phi) in params {
        let s: Vec<f64> = (0..n)
            .map(|j| {
                let t = j as f64 * dt;
                (-g * t).exp() * (w * t + phi).cos()
            })
            .collect();
        let x = dct_direct(&s);
        let b = dct_envelope_bound(g, w, dt, n, phi).map_err(e2s)?;
        for k in 0..n {
            ensure(x[k].abs() <= b[k] * (1.0 + 1e-12) + 1e-12, || {
                format!("gamma={g}, omega={w}, dt={dt}, N={n}, k={k}: |x| {} > {}", x[k].abs(), b[k])
            })?;
            tightest = tightest.min(b[k] - x[k].abs());
        }
    }
    Ok(format!("21 parameter sets, min slack {tightest:.2e}"))
}

fn normalization_identity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    let (n, m) = (5usize, 2usize);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut total = 0.0;
        let mut masks = 0;
        for a in 0..n {
            for b in a + 1..n {
                let plan = SamplingPlan::new(n, vec![a, b], None).map_err(e2s)?;
                let op = MeasurementOperator::<f64>::dct(plan.clone()).map_err(e2s)?;
                let scale = op.scale();
                total += subsample(&plan, &z).map_err(e2s)?.iter().map(|v| (scale * v).powi(2)).sum::<f64>();
                masks += 1;
            }
        }
        ensure(masks == binom(n as u64, m as u64), || format!("{masks} masks"))?;
        let norm: f64 = z.iter().map(|v| v * v).sum();
        worst = worst.max((total / masks as f64 - norm).abs());
    }
    ensure(worst <= 1e-12, || format!("deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

struct DeskRuns {
    first: PathBuf,
    second: PathBuf,
    cfg: ExperimentConfig,
    wall: Duration,
}

fn run_desk(dir: &Path) -> std::result::Result<ExperimentConfig, String> {
    let cfg = ExperimentConfig::preset(Profile::Desk);
    let mut pipe = Pipeline::new(cfg.clone(), dir.to_path_buf()).map_err(e2s)?;
    pipe.cmd_sweep().map_err(e2s)?;
    Ok(cfg)
}

fn compressibility(runs: &DeskRuns) -> Check {
    let text = std::fs::File::open(runs.first.join("truth/S.csv")).map_err(e2s)?;
    let (labels, values) = csst_core::io::read_signal_csv(text).map_err(e2s)?;
    let n = values.ncols();
    let mut sums = vec![0.0; n];
    let mut count = 0;
    for (i, p) in labels.iter().enumerate() {
        if p.weight() != 1 {
            continue;
        }
        // best s-term error from sorted squared coefficients
        let mut sq: Vec<f64> = dct_direct(&values.row(i).to_vec()).iter().map(|v| v * v).collect();
        sq.sort_by(|a, b| b.total_cmp(a));
        // suffix sums from the smallest coefficient up, so s = N is exactly zero
        let mut tail = 0.0;
        for s in (1..=n).rev() {
            sums[s - 1] += (tail / n as f64).sqrt();
            tail += sq[s - 1];
        }
        count += 1;
    }
    ensure(count == 9, || format!("{count} weight-1 traces"))?;
    let mean: Vec<f64> = sums.iter().map(|v| v / count as f64).collect();
    ensure(mean.windows(2).all(|w| w[1] <= w[0] + 1e-15), || "sector curve increases".into())?;
    let cross = mean.iter().position(|v| *v < 1e-3 * mean[0]).map(|k| k + 1);
    let cross = cross.ok_or_else(|| "never drops below 1e-3 of s=1".to_string())?;
    ensure(cross < n / 2, || format!("drops below 1e-3 only at s={cross} (N/2 = {})", n / 2))?;

    let lib: Vec<Vec<String>> = csv::Reader::from_path(runs.first.join("figures/truncation_sector.csv"))
        .map_err(e2s)?
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<std::result::Result<_, _>>()
        .map_err(e2s)?;
    for row in lib.iter().filter(|r| r[0] == "1") {
        let s: usize = row[1].parse().map_err(e2s)?;
        let v: f64 = row[3].parse().map_err(e2s)?;
        ensure((v - mean[s - 1]).abs() <= 1e-9, || format!("report table differs at s={s}"))?;
    }
    Ok(format!("weight-1 sector mean below 1e-3 of s=1 at s={cross} < {}", n / 2))
}

fn csst_beats_baseline(runs: &DeskRuns) -> Check {
    let n = runs.cfg.grid.n_steps;
    let m = runs.cfg.masks.iter().copied().min_by_key(|&m| m.abs_diff(n * 6 / 10)).unwrap();
    ensure(runs.cfg.shots.contains(&100), || "desk profile lacks N_ST = 100".into())?;
    let path = runs.first.join(format!("cells/nst100_m{m}/reports.csv"));
    let rows: Vec<ReportRow> = csv::Reader::from_path(&path)
        .map_err(e2s)?
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(e2s)?;
    let kept: Vec<&ReportRow> = rows.iter().filter(|r| r.weight == 1 && r.status == "kept").collect();
    ensure(!kept.is_empty(), || "no kept weight-1 observables".into())?;
    let st = kept.iter().map(|r| r.rmse_st).sum::<f64>() / kept.len() as f64;
    let cs = kept.iter().map(|r| r.rmse_cs_best).sum::<f64>() / kept.len() as f64;
    let ratio = cs / st;
    let srf = n as f64 / m as f64 / (ratio * ratio);
    ensure(cs <= st, || format!("CSST {cs:.4} > ST {st:.4}"))?;
    ensure(srf > n as f64 / m as f64, || format!("SRF {srf:.3} <= N/m"))?;
    ensure(runs.wall <= Duration::from_secs(30 * 60), || format!("desk sweep took {:?}", runs.wall))?;
    Ok(format!(
        "m={m}: CSST {cs:.4} <= ST {st:.4}, SRF {srf:.2} > N/m {:.2} ({} kept, sweep {:.0} s)",
        n as f64 / m as f64,
        kept.len(),
        runs.wall.as_secs_f64()
    ))
}

fn csv_files(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir).into_iter().flatten().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv") {
                let rel = p.strip_prefix(root).unwrap().to_path_buf();
                out.insert(rel, std::fs::read(&p).unwrap_or_default());
            }
        }
    }
    out
}

fn determinism(runs: &DeskRuns) -> Check {
    let a = csv_files(&runs.first);
    let b = csv_files(&runs.second);
    ensure(!a.is_empty(), || "no CSV outputs".into())?;
    ensure(a.keys().eq(b.keys()), || "different CSV file sets".into())?;
    for (k, v) in &a {
        ensure(b[k] == *v, || format!("{} differs", k.display()))?;
    }
    Ok(format!("{} CSV files byte-identical", a.len()))
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |id: usize, name: &str, limit: Duration, f: &dyn Fn() -> Check| {
        let t0 = Instant::now();
        let mut out = f();
        let dt = t0.elapsed();
        if out.is_ok() && dt > limit {
            out = Err(format!("runtime {dt:?} over {limit:?}"));
        }
        match out {
            Ok(msg) => println!("PASS  {id:>2} {name}: {msg} [{:.2} s]", dt.as_secs_f64()),
            Err(msg) => {
                failures += 1;
                println!("FAIL  {id:>2} {name}: {msg} [{:.2} s]", dt.as_secs_f64());
            }
        }
    };
    let secs = Duration::from_secs;
    report(1, "observable count", secs(1), &observable_count);
    report(2, "sample complexity", secs(1), &sample_complexity);
    report(3, "transform exactness", secs(10), &transform_exactness);
    report(4, "shadow estimator statistics", secs(120), &shadow_statistics);
    report(5, "lindblad correctness", secs(120), &lindblad_correctness);
    report(6, "lasso oracle", secs(60), &lasso_oracle);
    report(7, "exact sparse recovery", secs(120), &exact_sparse_recovery);
    report(8, "envelope bound", secs(30), &envelope_bound);

    let tmp = tempfile::tempdir().expect("tempdir");
    let first = tmp.path().join("a");
    let second = tmp.path().join("b");
    let t0 = Instant::now();
    let desk = run_desk(&first).and_then(|cfg| {
        let wall = t0.elapsed();
        run_desk(&second).map(|_| DeskRuns {
            first: first.clone(),
            second: second.clone(),
            cfg,
            wall,
        })
    });
    match &desk {
        Ok(runs) => {
            report(9, "compressibility trend", secs(300), &|| compressibility(runs));
            report(10, "csst beats baseline", secs(60), &|| csst_beats_baseline(runs));
        }
        Err(e) => {
            for (id, name) in [(9, "compressibility trend"), (10, "csst beats baseline")] {
                report(id, name, secs(1), &|| Err(format!("desk sweep failed: {e}")));
            }
        }
    }
    report(11, "normalization identity", secs(1), &normalization_identity);
    match &desk {
        Ok(runs) => report(12, "determinism", secs(60), &|| determinism(runs)),
        Err(e) => report(12, "determinism", secs(1), &|| Err(format!("desk sweep failed: {e}"))),
    }

    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
