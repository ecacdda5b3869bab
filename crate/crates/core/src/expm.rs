//! Scaled-and-squared truncated Taylor series for the matrix exponential.
//!
//! This is deliberately independent of the spectral route in
//! [`crate::propagation`] and serves as the reference it is checked against.

use nalgebra::DMatrix;
use num_complex::Complex64;

const MAX_TERMS: usize = 60;

/// `exp(m)` for a small dense complex matrix.
pub fn expm_taylor(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let norm = max_row_sum(m);
    // Scale so the series argument has norm at most 1/2.
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m.scale(0.5f64.powi(squarings as i32));

    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=MAX_TERMS {
        term = (&term * &scaled).unscale(k as f64);
        result += &term;
        if max_row_sum(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `exp(-i t H)`.
pub fn unitary_taylor(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    expm_taylor(&h.map(|z| z * Complex64::new(0.0, -t)))
}

/// `exp(-t L)` for a real matrix.
pub fn heat_kernel_taylor(l: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    expm_taylor(&l.map(|x| Complex64::new(-t * x, 0.0))).map(|z| z.re)
}

fn max_row_sum(m: &DMatrix<Complex64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}
