#![allow(dead_code)]

/// `J_m(x)` from the ascending series `Σ_k (-1)^k (x/2)^{2k+m} / (k! (k+m)!)`,
/// summed until terms fall below `1e-16` of the running total.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = (1..=m).fold(1.0, |acc, j| acc * half / j as f64);
    let mut sum = term;
    for k in 1..500u32 {
        term *= -half * half / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= 1e-16 * sum.abs() && k as f64 > half {
            break;
        }
    }
    sum
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn bessel_reference_values() {
    assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
    assert!((bessel_j(1, 10.0) - 0.043_472_746_168_861_44).abs() < 1e-13);
    assert!((bessel_j(5, 10.0) - -0.234_061_528_186_793_6).abs() < 1e-13);
}
