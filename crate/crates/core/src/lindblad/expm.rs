//! Dense matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham 2005).

use ndarray::Array2;
use ndarray_linalg::Inverse;
use num_complex::Complex64;

use crate::error::{CsstError, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495_585_217_958_292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504_178_996_162_932e-1),
    (9, 2.097_847_961_257_068e0),
];
const THETA_13: f64 = 5.371_920_351_148_152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm1(a: &Array2<Complex64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn eye(n: usize) -> Array2<Complex64> {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// exp(A) for a square complex matrix.
pub fn expm(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(CsstError::InvalidArgument(format!("expm of non-square {:?}", a.dim())));
    }
    if a.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(CsstError::Numerical("expm input has non-finite entries".into()));
    }
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    let norm = norm1(a);
    for &(m, theta) in &THETA {
        if norm <= theta {
            return finish(pade_low(a, m)?, 0);
        }
    }
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.mapv(|v| v * 2f64.powi(-s));
    finish(pade13(&scaled)?, s as u32)
}

fn finish(mut x: Array2<Complex64>, squarings: u32) -> Result<Array2<Complex64>> {
    for _ in 0..squarings {
        x = x.dot(&x);
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(CsstError::Numerical("matrix exponential produced non-finite entries".into()));
    }
    Ok(x)
}

fn pade_low(a: &Array2<Complex64>, m: usize) -> Result<Array2<Complex64>> {
    let b: &[f64] = match m {
        3 => &B3,
        5 => &B5,
        7 => &B7,
        _ => &B9,
    };
    let n = a.nrows();
    let a2 = a.dot(a);
    // even powers I, A^2, A^4, ...
    let mut powers = vec![eye(n), a2.clone()];
    while powers.len() <= m / 2 {
        let next = powers.last().unwrap().dot(&a2);
        powers.push(next);
    }
    let mut u_inner = Array2::zeros((n, n));
    let mut v = Array2::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        v.scaled_add(re(b[2 * k]), p);
        u_inner.scaled_add(re(b[2 * k + 1]), p);
    }
    let u = a.dot(&u_inner);
    solve_pade(u, v)
}

fn pade13(a: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let n = a.nrows();
    let id = eye(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let b = &B13;

    let w1 = &a6 * re(b[13]) + &a4 * re(b[11]) + &a2 * re(b[9]);
    let w2 = &a6 * re(b[7]) + &a4 * re(b[5]) + &a2 * re(b[3]) + &id * re(b[1]);
    let u = a.dot(&(a6.dot(&w1) + w2));

    let z1 = &a6 * re(b[12]) + &a4 * re(b[10]) + &a2 * re(b[8]);
    let z2 = &a6 * re(b[6]) + &a4 * re(b[4]) + &a2 * re(b[2]) + &id * re(b[0]);
    let v = a6.dot(&z1) + z2;
    solve_pade(u, v)
}

/// (V - U)^{-1} (V + U)
fn solve_pade(u: Array2<Complex64>, v: Array2<Complex64>) -> Result<Array2<Complex64>> {
    let denom = &v - &u;
    let numer = v + u;
    let inv = denom
        .inv()
        .map_err(|e| CsstError::Numerical(format!("Padé denominator is singular: {e}")))?;
    Ok(inv.dot(&numer))
}
