//! Orthonormal DCT-II, random timestep masks and the normalized subsampled
//! measurement operator `A = sqrt(N/m) P_Omega F^T`.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::scalar::Real;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    Dct2,
    /// Real orthonormal Fourier basis (constant, cos/sin pairs, Nyquist).
    RealDft,
}

/// Orthonormal analysis matrix `F` stored implicitly.
#[derive(Debug, Clone)]
pub struct Basis<T> {
    kind: TransformKind,
    n: usize,
    // DCT: cos(pi i / 2N) for i < 4N. DFT: cos(2 pi i / N) then sin(2 pi i / N).
    table: Vec<T>,
    dc: T,
    ac: T,
}

impl<T: Real> Basis<T> {
    pub fn new(kind: TransformKind, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(invalid!("transform length must be at least 1"));
        }
        let nf = n as f64;
        let table = match kind {
            TransformKind::Dct2 => (0..4 * n)
                .map(|i| T::of((std::f64::consts::PI * i as f64 / (2.0 * nf)).cos()))
                .collect(),
            TransformKind::RealDft => {
                let angle = |i: usize| 2.0 * std::f64::consts::PI * i as f64 / nf;
                (0..n)
                    .map(|i| T::of(angle(i).cos()))
                    .chain((0..n).map(|i| T::of(angle(i).sin())))
                    .collect()
            }
        };
        Ok(Basis {
            kind,
            n,
            table,
            dc: T::of((1.0 / nf).sqrt()),
            ac: T::of((2.0 / nf).sqrt()),
        })
    }

    pub fn dct(n: usize) -> Result<Self> {
        Self::new(TransformKind::Dct2, n)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    /// `F[k][j]`: coefficient row `k`, time sample `j`.
    #[inline]
    pub fn entry(&self, k: usize, j: usize) -> T {
        let n = self.n;
        match self.kind {
            TransformKind::Dct2 => {
                if k == 0 {
                    self.dc
                } else {
                    self.ac * self.table[((2 * j + 1) * k) % (4 * n)]
                }
            }
            TransformKind::RealDft => {
                if k == 0 {
                    return self.dc;
                }
                if n % 2 == 0 && k == n - 1 {
                    return if j % 2 == 0 { self.dc } else { -self.dc };
                }
                let r = k.div_ceil(2);
                let idx = (r * j) % n;
                if k % 2 == 1 {
                    self.ac * self.table[idx]
                } else {
                    self.ac * self.table[n + idx]
                }
            }
        }
    }

    /// x = F s
    pub fn forward(&self, s: &[T]) -> Result<Vec<T>> {
        self.check_len(s.len())?;
        Ok((0..self.n)
            .map(|k| s.iter().enumerate().map(|(j, &v)| self.entry(k, j) * v).sum())
            .collect())
    }

    /// s = F^T x
    pub fn inverse(&self, x: &[T]) -> Result<Vec<T>> {
        self.check_len(x.len())?;
        Ok((0..self.n)
            .map(|j| x.iter().enumerate().map(|(k, &v)| self.entry(k, j) * v).sum())
            .collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(invalid!("vector length {len} != transform length {}", self.n));
        }
        Ok(())
    }
}

pub fn dct2_forward<T: Real>(s: &[T]) -> Result<Vec<T>> {
    Basis::dct(s.len())?.forward(s)
}

pub fn dct2_inverse<T: Real>(x: &[T]) -> Result<Vec<T>> {
    Basis::dct(x.len())?.inverse(x)
}

/// Sorted index set `Omega` (0-based internally, 1-based on disk).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingPlan {
    n: usize,
    omega: Vec<usize>,
    seed: Option<u64>,
}

impl SamplingPlan {
    pub fn new(n: usize, mut omega: Vec<usize>, seed: Option<u64>) -> Result<Self> {
        omega.sort_unstable();
        if omega.is_empty() || omega.len() > n {
            return Err(invalid!("mask size {} outside 1..={n}", omega.len()));
        }
        if omega.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid!("mask indices are not unique"));
        }
        if omega[omega.len() - 1] >= n {
            return Err(invalid!("mask index out of range for length {n}"));
        }
        Ok(SamplingPlan { n, omega, seed })
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, (0..n).collect(), None)
    }

    pub fn len_full(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanRecord {
    #[serde(rename = "N")]
    n: usize,
    m: usize,
    omega: Vec<usize>,
    seed: Option<u64>,
}

impl Serialize for SamplingPlan {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PlanRecord {
            n: self.n,
            m: self.m(),
            omega: self.omega.iter().map(|i| i + 1).collect(),
            seed: self.seed,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SamplingPlan {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let r = PlanRecord::deserialize(deserializer)?;
        if r.m != r.omega.len() || r.omega.contains(&0) {
            return Err(D::Error::custom("inconsistent sampling plan record"));
        }
        SamplingPlan::new(r.n, r.omega.into_iter().map(|i| i - 1).collect(), r.seed).map_err(D::Error::custom)
    }
}

/// Uniform `m`-subset of `0..n` by partial Fisher-Yates, sorted.
pub fn sample_mask(n: usize, m: usize, seed: u64) -> Result<SamplingPlan> {
    if m < 1 || m > n {
        return Err(invalid!("mask size {m} outside 1..={n}"));
    }
    let mut rng = seed::stream(seed, "mask", &[n as u64, m as u64]);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..m {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(m);
    SamplingPlan::new(n, pool, Some(seed))
}

pub fn subsample<T: Copy>(plan: &SamplingPlan, v: &[T]) -> Result<Vec<T>> {
    if v.len() != plan.n {
        return Err(invalid!("vector length {} != plan length {}", v.len(), plan.n));
    }
    Ok(plan.omega.iter().map(|&i| v[i]).collect())
}

/// Places `values` at `Omega`, zeros elsewhere.
pub fn scatter<T: Real>(plan: &SamplingPlan, values: &[T]) -> Result<Vec<T>> {
    if values.len() != plan.m() {
        return Err(invalid!("{} values for a mask of size {}", values.len(), plan.m()));
    }
    let mut out = vec![T::zero(); plan.n];
    for (&i, &v) in plan.omega.iter().zip(values) {
        out[i] = v;
    }
    Ok(out)
}

/// `A = sqrt(N/m) P_Omega F^T`, applied without materializing.
#[derive(Debug, Clone)]
pub struct MeasurementOperator<T> {
    plan: SamplingPlan,
    basis: Basis<T>,
    scale: T,
}

impl<T: Real> MeasurementOperator<T> {
    pub fn new(plan: SamplingPlan, kind: TransformKind) -> Result<Self> {
        let basis = Basis::new(kind, plan.n)?;
        let scale = T::of((plan.n as f64 / plan.m() as f64).sqrt());
        Ok(MeasurementOperator { plan, basis, scale })
    }

    pub fn dct(plan: SamplingPlan) -> Result<Self> {
        Self::new(plan, TransformKind::Dct2)
    }

    pub fn plan(&self) -> &SamplingPlan {
        &self.plan
    }

    pub fn basis(&self) -> &Basis<T> {
        &self.basis
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn rows(&self) -> usize {
        self.plan.m()
    }

    pub fn cols(&self) -> usize {
        self.plan.n
    }

    /// `A[i][k]`
    #[inline]
    pub fn entry(&self, i: usize, k: usize) -> T {
        self.scale * self.basis.entry(k, self.plan.omega[i])
    }

    /// A x
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        let s = self.basis.inverse(x)?;
        Ok(subsample(&self.plan, &s)?.into_iter().map(|v| v * self.scale).collect())
    }

    /// A^T y = F scatter(sqrt(N/m) y)
    pub fn adjoint(&self, y: &[T]) -> Result<Vec<T>> {
        let scaled: Vec<T> = y.iter().map(|&v| v * self.scale).collect();
        self.basis.forward(&scatter(&self.plan, &scaled)?)
    }

    /// Dense row-major copy; only for small brute-force checks.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        (0..self.rows()).map(|i| (0..self.cols()).map(|k| self.entry(i, k)).collect()).collect()
    }
}

/// Keep the `s` largest-magnitude entries (lower index wins ties).
pub fn top_s_truncate<T: Real>(x: &[T], s: usize) -> Result<Vec<T>> {
    if s > x.len() {
        return Err(invalid!("sparsity {s} exceeds length {}", x.len()));
    }
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].abs().partial_cmp(&x[a].abs()).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
    let mut out = vec![T::zero(); x.len()];
    for &i in &order[..s] {
        out[i] = x[i];
    }
    Ok(out)
}

/// `(s, ||x - x_s||_2 / sqrt(N))` for the DCT coefficients `x` of `signal`.
pub fn truncation_rmse_curve<T: Real>(signal: &[T], s_values: &[usize]) -> Result<Vec<(usize, T)>> {
    let x = dct2_forward(signal)?;
    let n = T::of_usize(x.len());
    // squared magnitudes in descending order give every tail at once
    let mut mags: Vec<T> = x.iter().map(|v| *v * *v).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut tails = vec![T::zero(); mags.len() + 1];
    for i in (0..mags.len()).rev() {
        tails[i] = tails[i + 1] + mags[i];
    }
    s_values
        .iter()
        .map(|&s| {
            if s > x.len() {
                return Err(invalid!("sparsity {s} exceeds length {}", x.len()));
            }
            Ok((s, (tails[s] / n).sqrt()))
        })
        .collect()
}
