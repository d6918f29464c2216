//! Exhaustive restricted isometry constant for tiny dense matrices.

use ndarray::Array2;
use ndarray_linalg::{EigValsh, UPLO};

use crate::error::{invalid, CsstError, Result};

pub const MAX_COLUMNS: usize = 16;
pub const MAX_SPARSITY: usize = 3;

/// `delta_s = max over supports |S| = s of max(lambda_max - 1, 1 - lambda_min)`
/// of the Gram matrix `A_S^T A_S`. `a` is row-major.
pub fn rip_constant_bruteforce(a: &[Vec<f64>], s: usize) -> Result<f64> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || a.iter().any(|r| r.len() != cols) {
        return Err(invalid!("matrix must be nonempty and rectangular"));
    }
    if s == 0 || s > cols {
        return Err(invalid!("sparsity {s} outside 1..={cols}"));
    }
    if cols > MAX_COLUMNS || s > MAX_SPARSITY {
        return Err(CsstError::ResourceLimit(format!(
            "exhaustive RIP limited to N <= {MAX_COLUMNS}, s <= {MAX_SPARSITY} (got N={cols}, s={s})"
        )));
    }
    let gram = Array2::from_shape_fn((cols, cols), |(i, j)| (0..rows).map(|r| a[r][i] * a[r][j]).sum::<f64>());
    let mut delta = 0.0f64;
    let mut support: Vec<usize> = (0..s).collect();
    loop {
        let sub = Array2::from_shape_fn((s, s), |(i, j)| gram[[support[i], support[j]]]);
        let ev = sub
            .eigvalsh(UPLO::Lower)
            .map_err(|e| CsstError::Numerical(format!("eigvalsh failed: {e}")))?;
        let lo = ev.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ev.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        delta = delta.max(hi - 1.0).max(1.0 - lo);
        if !next_combination(&mut support, cols) {
            break;
        }
    }
    Ok(delta)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{sample_mask, MeasurementOperator, SamplingPlan};

    #[test]
    fn orthonormal_columns() {
        let op = MeasurementOperator::<f64>::dct(SamplingPlan::full(8).unwrap()).unwrap();
        for s in 1..=3 {
            assert!(rip_constant_bruteforce(&op.to_dense(), s).unwrap() < 1e-12);
        }
    }

    #[test]
    fn duplicated_column() {
        let a = vec![vec![1.0, 1.0], vec![0.0, 0.0]];
        assert!((rip_constant_bruteforce(&a, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subsampled_dct_below_one() {
        for seed in 0..20 {
            let op = MeasurementOperator::<f64>::dct(sample_mask(12, 9, seed).unwrap()).unwrap();
            assert!(rip_constant_bruteforce(&op.to_dense(), 2).unwrap() < 1.0, "seed {seed}");
        }
    }

    #[test]
    fn caps() {
        let a = vec![vec![1.0; 17]];
        assert!(matches!(rip_constant_bruteforce(&a, 1), Err(CsstError::ResourceLimit(_))));
        let a = vec![vec![1.0; 5]];
        assert!(matches!(rip_constant_bruteforce(&a, 4), Err(CsstError::ResourceLimit(_))));
        assert!(rip_constant_bruteforce(&a, 0).is_err());
    }
}
