//! Reconstruction error, SNR, observable filters and per-weight aggregation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CsstError, Result};
use crate::pauli::PauliString;
use crate::scalar::Real;

pub const SNR_CLAMP_DB: f64 = 300.0;
pub const DEFAULT_VARIANCE_THRESHOLD: f64 = 1e-3;
/// Read in dB. Whether the cut was meant as a linear ratio is ambiguous.
pub const DEFAULT_SNR_THRESHOLD_DB: f64 = 1.0;

fn same_len<T>(a: &[T], b: &[T]) -> Result<()> {
    if a.len() != b.len() || a.is_empty() {
        return Err(invalid!("length mismatch or empty input ({} vs {})", a.len(), b.len()));
    }
    Ok(())
}

/// `sqrt(mean((truth - estimate)^2))`
pub fn rmse<T: Real>(truth: &[T], estimate: &[T]) -> Result<T> {
    same_len(truth, estimate)?;
    let sq: T = truth.iter().zip(estimate).map(|(a, b)| (*a - *b) * (*a - *b)).sum();
    Ok((sq / T::of_usize(truth.len())).sqrt())
}

/// `10 log10(sum S^2 / sum (S_hat - S)^2)`, clamped to +300 dB on zero error.
pub fn snr_db<T: Real>(truth: &[T], estimate: &[T]) -> Result<T> {
    same_len(truth, estimate)?;
    let signal: T = truth.iter().map(|v| *v * *v).sum();
    if signal == T::zero() {
        return Err(CsstError::UndefinedSignal);
    }
    let noise: T = truth.iter().zip(estimate).map(|(a, b)| (*b - *a) * (*b - *a)).sum();
    if noise == T::zero() {
        return Ok(T::of(SNR_CLAMP_DB));
    }
    Ok((T::of(10.0) * (signal / noise).log10()).min(T::of(SNR_CLAMP_DB)))
}

/// Population variance.
pub fn variance<T: Real>(v: &[T]) -> T {
    let n = T::of_usize(v.len());
    let mean = v.iter().copied().sum::<T>() / n;
    v.iter().map(|x| (*x - mean) * (*x - mean)).sum::<T>() / n
}

/// Keep iff the population variance of `truth` is at least `threshold`.
pub fn variance_filter<T: Real>(truth: &[T], threshold: T) -> Result<bool> {
    if truth.len() < 2 {
        return Err(invalid!("variance filter needs N >= 2"));
    }
    Ok(variance(truth) >= threshold)
}

/// Keep iff `snr_db(truth, estimate) >= threshold_db`.
pub fn snr_filter<T: Real>(truth: &[T], estimate: &[T], threshold_db: T) -> Result<bool> {
    Ok(snr_db(truth, estimate)? >= threshold_db)
}

/// Inferred shot-reduction factor `(N/m) / R^2`.
pub fn srf<T: Real>(n: usize, m: usize, r: T) -> Result<T> {
    if m < 1 || m > n {
        return Err(invalid!("need 1 <= m <= N (N={n}, m={m})"));
    }
    if !(r > T::zero()) || !r.is_finite() {
        return Err(invalid!("ratio R must be positive and finite, got {r}"));
    }
    Ok(T::of_usize(n) / T::of_usize(m) / (r * r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FilterStatus {
    Kept,
    VarianceFiltered,
    SnrFiltered,
}

impl FilterStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterStatus::Kept => "kept",
            FilterStatus::VarianceFiltered => "variance-filtered",
            FilterStatus::SnrFiltered => "snr-filtered",
        }
    }
}

/// Variance cut first, then the SNR cut on the baseline estimate.
pub fn classify(truth: &[f64], baseline: &[f64], var_threshold: f64, snr_threshold_db: f64) -> Result<FilterStatus> {
    if !variance_filter(truth, var_threshold)? {
        return Ok(FilterStatus::VarianceFiltered);
    }
    match snr_filter(truth, baseline, snr_threshold_db) {
        Ok(true) => Ok(FilterStatus::Kept),
        Ok(false) | Err(CsstError::UndefinedSignal) => Ok(FilterStatus::SnrFiltered),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub pauli: PauliString,
    pub weight: usize,
    pub rmse_st: f64,
    pub rmse_cs_best: f64,
    pub alpha_star: f64,
    /// `rmse_cs_best / rmse_st`; `None` when the baseline error is zero.
    pub ratio: Option<f64>,
    pub snr_db: f64,
    pub srf: Option<f64>,
    pub filtered: FilterStatus,
}

impl ObservableReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        pauli: PauliString,
        n: usize,
        m: usize,
        rmse_st: f64,
        rmse_cs_best: f64,
        alpha_star: f64,
        snr_db: f64,
        filtered: FilterStatus,
    ) -> Result<Self> {
        if !(rmse_st >= 0.0) || !(rmse_cs_best >= 0.0) {
            return Err(invalid!("RMSE values must be nonnegative"));
        }
        let ratio = (rmse_st > 0.0).then(|| rmse_cs_best / rmse_st);
        let srf = match ratio {
            Some(r) if r > 0.0 => Some(srf(n, m, r)?),
            _ => None,
        };
        Ok(ObservableReport {
            weight: pauli.weight(),
            pauli,
            rmse_st,
            rmse_cs_best,
            alpha_star,
            ratio,
            snr_db,
            srf,
            filtered,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub count: usize,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Option<MeanStd> {
        if values.is_empty() {
            return None;
        }
        Some(MeanStd {
            mean: values.iter().sum::<f64>() / values.len() as f64,
            std: variance(values).sqrt(),
            count: values.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSummary {
    pub weight: usize,
    pub total: usize,
    pub kept: usize,
    pub variance_filtered: usize,
    pub snr_filtered: usize,
    /// Kept observables whose baseline error is zero (no ratio).
    pub undefined_ratio: usize,
    pub rmse_st: Option<MeanStd>,
    pub rmse_cs: Option<MeanStd>,
    pub alpha_star: Option<MeanStd>,
    pub ratio: Option<MeanStd>,
    pub srf: Option<MeanStd>,
}

/// Groups by weight (ascending). Statistics use kept observables only.
pub fn aggregate_by_weight(reports: &[ObservableReport]) -> Vec<WeightSummary> {
    let mut groups: BTreeMap<usize, Vec<&ObservableReport>> = BTreeMap::new();
    for r in reports {
        groups.entry(r.weight).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(weight, rs)| {
            let count = |s: FilterStatus| rs.iter().filter(|r| r.filtered == s).count();
            let kept: Vec<&&ObservableReport> = rs.iter().filter(|r| r.filtered == FilterStatus::Kept).collect();
            let collect = |f: &dyn Fn(&ObservableReport) -> Option<f64>| {
                MeanStd::of(&kept.iter().filter_map(|r| f(r)).collect::<Vec<_>>())
            };
            WeightSummary {
                weight,
                total: rs.len(),
                kept: kept.len(),
                variance_filtered: count(FilterStatus::VarianceFiltered),
                snr_filtered: count(FilterStatus::SnrFiltered),
                undefined_ratio: kept.iter().filter(|r| r.ratio.is_none()).count(),
                rmse_st: collect(&|r| Some(r.rmse_st)),
                rmse_cs: collect(&|r| Some(r.rmse_cs_best)),
                alpha_star: collect(&|r| Some(r.alpha_star)),
                ratio: collect(&|r| r.ratio),
                srf: collect(&|r| r.srf),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_examples() {
        let a = [1.0, -2.0, 3.5];
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        let b: Vec<f64> = a.iter().map(|v| v - 0.3).collect();
        assert!((rmse(&a, &b).unwrap() - 0.3).abs() < 1e-15);
        assert!(rmse(&a, &a[..2]).is_err());
    }

    #[test]
    fn snr_examples() {
        let t = vec![1.0; 100];
        let e: Vec<f64> = t.iter().map(|v| v + 0.1).collect();
        assert!((snr_db(&t, &e).unwrap() - 20.0).abs() < 1e-10);
        assert_eq!(snr_db(&t, &t).unwrap(), 300.0);
        let e2: Vec<f64> = t.iter().map(|v| v * 2.0).collect();
        assert!(snr_db(&t, &e2).unwrap().abs() < 1e-12);
        assert!(matches!(snr_db(&[0.0, 0.0], &[1.0, 0.0]), Err(CsstError::UndefinedSignal)));
        assert!(snr_filter(&t, &e, 1.0).unwrap());
        assert!(!snr_filter(&t, &e2, 1.0).unwrap());
        assert!(snr_filter(&t, &e2, f64::NEG_INFINITY).unwrap());
    }

    #[test]
    fn variance_examples() {
        assert!(!variance_filter(&[0.4; 10], 1e-3).unwrap());
        let alt: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((variance(&alt) - 1.0).abs() < 1e-15);
        assert!(variance_filter(&alt, 1e-3).unwrap());
        assert!(variance_filter(&[0.4; 10], 0.0).unwrap());
        assert!(variance_filter(&[1.0], 0.0).is_err());
    }

    #[test]
    fn srf_examples() {
        assert_eq!(srf(10, 10, 1.0).unwrap(), 1.0);
        assert!((srf(1000, 600, 1.0f64).unwrap() - 1.6667).abs() < 1e-4);
        assert_eq!(srf(10, 10, 0.5).unwrap(), 4.0);
        assert!(srf(10, 11, 1.0).is_err());
        assert!(srf(10, 5, 0.0).is_err());
    }

    #[test]
    fn aggregation_basics() {
        let p: PauliString = "XI".parse().unwrap();
        let r = ObservableReport::new(p, 10, 5, 0.2, 0.1, 1e-4, 10.0, FilterStatus::Kept).unwrap();
        let s = aggregate_by_weight(std::slice::from_ref(&r));
        assert_eq!(s.len(), 1);
        let st = s[0].rmse_cs.unwrap();
        assert_eq!((st.mean, st.std), (0.1, 0.0));
        assert_eq!(s[0].srf.unwrap().mean, 8.0);
        let s = aggregate_by_weight(&[r.clone(), r]);
        assert_eq!(s[0].alpha_star.unwrap().std, 0.0);
        let z = ObservableReport::new("ZZ".parse().unwrap(), 10, 5, 0.0, 0.1, 1e-4, 10.0, FilterStatus::Kept).unwrap();
        assert!(z.ratio.is_none() && z.srf.is_none());
    }
}
