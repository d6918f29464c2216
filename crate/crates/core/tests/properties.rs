use approx::assert_abs_diff_eq;
use csst_core::metrics::{rmse, snr_db, srf};
use csst_core::pauli::{enumerate_paulis, pauli_matrix, trace_with};
use csst_core::recovery::{lasso_cd, LassoConfig};
use csst_core::shadow::{estimate_pauli, sample_snapshots, PauliMoments};
use csst_core::transform::{dct2_forward, dct2_inverse, sample_mask, MeasurementOperator};
use csst_core::{DensityMatrix, Letter, PauliString, SamplingPlan};
use ndarray::Array2;
use num_complex::Complex64;
use proptest::prelude::*;

fn letters(n: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop_oneof![Just(Letter::I), Just(Letter::X), Just(Letter::Y), Just(Letter::Z)], n)
}

fn density(n: usize, entries: &[(f64, f64)]) -> DensityMatrix {
    let d = 1 << n;
    let g = Array2::from_shape_fn((d, d), |(r, c)| {
        let (a, b) = entries[r * d + c];
        Complex64::new(a, b)
    });
    let mut rho = g.dot(&g.t().mapv(|v| v.conj()));
    let tr: Complex64 = rho.diag().sum();
    rho.mapv_inplace(|v| v / tr.re);
    DensityMatrix::new(rho).unwrap()
}

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << (2 * n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_text_roundtrip(ls in letters(5)) {
        let p = PauliString::from_letters(&ls).unwrap();
        let back: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
        prop_assert_eq!(p.weight(), ls.iter().filter(|l| **l != Letter::I).count());
    }

    #[test]
    fn fast_trace_matches_dense(ls in letters(3), e in complex_entries(3)) {
        let p = PauliString::from_letters(&ls).unwrap();
        let rho = density(3, &e);
        let dense: Complex64 = pauli_matrix(&p).unwrap().dot(rho.matrix()).diag().sum();
        let fast = trace_with(&p, rho.matrix());
        prop_assert!((dense - fast).norm() < 1e-12);
        prop_assert!(dense.im.abs() < 1e-12);
    }

    #[test]
    fn dct_parseval_and_roundtrip(s in prop::collection::vec(-10.0f64..10.0, 1..200)) {
        let x = dct2_forward(&s).unwrap();
        let e1: f64 = s.iter().map(|v| v * v).sum();
        let e2: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((e1 - e2).abs() <= 1e-12 * e1.max(1.0));
        let back = dct2_inverse(&x).unwrap();
        for (a, b) in s.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn operator_adjoint_identity(n in 2usize..80, frac in 0.05f64..1.0, seed in any::<u64>(), v in prop::collection::vec(-1.0f64..1.0, 160)) {
        let m = ((n as f64 * frac).ceil() as usize).clamp(1, n);
        let op = MeasurementOperator::<f64>::dct(sample_mask(n, m, seed).unwrap()).unwrap();
        let x = &v[..n];
        let y = &v[n..n + m];
        let lhs: f64 = op.apply(x).unwrap().iter().zip(y).map(|(a, b)| a * b).sum();
        let rhs: f64 = x.iter().zip(op.adjoint(y).unwrap()).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn soft_threshold_oracle_on_full_mask(n in 1usize..40, alpha in 1e-6f64..0.1, y in prop::collection::vec(-2.0f64..2.0, 40)) {
        let op = MeasurementOperator::<f64>::dct(SamplingPlan::full(n).unwrap()).unwrap();
        let y = &y[..n];
        let res = lasso_cd(&op, y, &LassoConfig::new(alpha), None).unwrap();
        let c = op.adjoint(y).unwrap();
        let t = alpha * n as f64;
        for (z, ck) in res.coefficients.iter().zip(&c) {
            let oracle = ck.signum() * (ck.abs() - t).max(0.0);
            prop_assert!((z - oracle).abs() < 1e-8);
        }
    }

    #[test]
    fn lasso_kkt(seed in any::<u64>(), alpha in 1e-5f64..1e-2, y in prop::collection::vec(-1.0f64..1.0, 24)) {
        let n = 48;
        let op = MeasurementOperator::<f64>::dct(sample_mask(n, 24, seed).unwrap()).unwrap();
        let cfg = LassoConfig::new(alpha);
        let res = lasso_cd(&op, &y, &cfg, None).unwrap();
        prop_assert!(res.converged);
        let r: Vec<f64> = op.apply(&res.coefficients).unwrap().iter().zip(&y).map(|(a, b)| a - b).collect();
        let g = op.adjoint(&r).unwrap();
        // KKT in coefficient-change units: tol scaled by the column norm.
        let slack = 10.0 * cfg.tol;
        for (z, gk) in res.coefficients.iter().zip(&g) {
            let grad = gk / n as f64;
            if *z == 0.0 {
                prop_assert!(grad.abs() <= alpha + slack, "{} > {}", grad.abs(), alpha);
            } else {
                prop_assert!((grad + alpha * z.signum()).abs() <= slack, "{grad} vs {}", alpha * z.signum());
            }
        }
    }

    #[test]
    fn rmse_triangle(a in prop::collection::vec(-5.0f64..5.0, 30), b in prop::collection::vec(-5.0f64..5.0, 30), c in prop::collection::vec(-5.0f64..5.0, 30)) {
        prop_assert!(rmse(&a, &c).unwrap() <= rmse(&a, &b).unwrap() + rmse(&b, &c).unwrap() + 1e-12);
        let norm: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        prop_assert!((rmse(&a, &b).unwrap() - norm / 30f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn snr_scale_invariance(t in prop::collection::vec(0.1f64..5.0, 20), e in prop::collection::vec(-1.0f64..1.0, 20), k in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0]) {
        let est: Vec<f64> = t.iter().zip(&e).map(|(a, b)| a + b).collect();
        let t2: Vec<f64> = t.iter().map(|v| v * k).collect();
        let est2: Vec<f64> = t.iter().zip(&e).map(|(a, b)| (a + b) * k).collect();
        prop_assert!((snr_db(&t, &est).unwrap() - snr_db(&t2, &est2).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn srf_threshold_equivalence() {
    for n in [10usize, 64, 256, 1000] {
        for m in (1..=n).step_by(7) {
            for i in 1..60 {
                let r = i as f64 * 0.05;
                let above = srf(n, m, r).unwrap() > 1.0;
                assert_eq!(above, r * r < n as f64 / m as f64, "n={n} m={m} r={r}");
            }
        }
    }
}

#[test]
fn normalization_identity_exhaustive() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let n = 5;
    let masks: Vec<Vec<usize>> = (0..n).flat_map(|a| (a + 1..n).map(move |b| vec![a, b])).collect();
    assert_eq!(masks.len(), 10);
    for _ in 0..10 {
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean: f64 = masks
            .iter()
            .map(|m| {
                let op = MeasurementOperator::<f64>::dct(SamplingPlan::new(n, m.clone(), None).unwrap()).unwrap();
                op.apply(&z).unwrap().iter().map(|v| v * v).sum::<f64>()
            })
            .sum::<f64>()
            / masks.len() as f64;
        let norm: f64 = z.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(mean, norm, epsilon = 1e-12);
    }
}

#[test]
fn moment_table_matches_mean_estimator() {
    let e: Vec<(f64, f64)> = (0..64).map(|i| ((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
    let rho = density(3, &e);
    let ds = sample_snapshots(&rho, 2000, 5).unwrap();
    let table = PauliMoments::from_dataset(&ds).unwrap();
    for p in enumerate_paulis(3, 3).unwrap() {
        assert_eq!(table.estimate(&p), estimate_pauli(&ds, &p).unwrap(), "{p}");
    }
}
