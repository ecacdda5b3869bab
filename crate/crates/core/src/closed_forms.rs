//! Analytic results for ring and complete-graph walks.
//!
//! Rings with a uniform link phase `θ` diagonalize in the Bloch basis, so
//! transition probabilities and the quantum-classical distance reduce to
//! finite Fourier sums. On complete graphs, Hamiltonians whose first column
//! is orthogonal to every other row (the Condition-1 family) rotate `|1>`
//! in a two-dimensional subspace, which gives closed forms for the flat-state
//! hitting time, the distance and the quantum speed limit.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::graph::Graph;
use crate::hamiltonian::{GaugeVector, PhasedHamiltonian};
use crate::propagation::{AmplitudeVector, SpectralDecomposition};

/// Eigenvalues `λ_s = 2 cos(θ + 2πs/n)` and Bloch eigenvectors
/// `(1/√n) exp(2πi s k / n)` for `s = 1..=n` of the uniform-phase ring
/// (zero diagonal). Column `s - 1` of the matrix is the eigenvector for
/// `λ_s`.
pub fn cycle_spectrum(n: usize, theta: f64) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    check_ring(n)?;
    let nf = n as f64;
    let values = (1..=n).map(|s| 2.0 * (theta + TAU * s as f64 / nf).cos()).collect();
    let vectors = DMatrix::from_fn(n, n, |k, s| {
        Complex64::from_polar(1.0 / nf.sqrt(), TAU * ((s + 1) * (k + 1)) as f64 / nf)
    });
    Ok((values, vectors))
}

/// `P_{j→k}(t) = (1/n²) |Σ_s exp(2i[π(k-j)s/n - t cos(θ + 2πs/n)])|²`.
pub fn cycle_transition_prob(n: usize, theta: f64, j: usize, k: usize, t: f64) -> Result<f64> {
    check_ring(n)?;
    for v in [j, k] {
        if v == 0 || v > n {
            return Err(WalkError::VertexOutOfRange { vertex: v, n });
        }
    }
    let nf = n as f64;
    let shift = k as f64 - j as f64;
    let sum: Complex64 = (1..=n)
        .map(|s| {
            let s = s as f64;
            Complex64::from_polar(1.0, 2.0 * (PI * shift * s / nf - t * (theta + TAU * s / nf).cos()))
        })
        .sum();
    Ok(sum.norm_sqr() / (nf * nf))
}

/// The ring distance as the complex double sum
///
/// ```text
/// 1 - e^{-2t}/n² Σ_{k,s} exp[2t cos(2πk/n) - 4it sin(θ + π(2s+k)/n) sin(πk/n)]
/// ```
///
/// evaluated term by term. The imaginary part vanishes analytically.
pub fn cycle_dqc_complex(n: usize, theta: f64, t: f64) -> Result<Complex64> {
    check_ring(n)?;
    if t < 0.0 {
        return Err(WalkError::NegativeTime(t));
    }
    let nf = n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..=n {
        let kf = k as f64;
        let radial = 2.0 * t * (TAU * kf / nf).cos();
        let sin_k = (PI * kf / nf).sin();
        for s in 1..=n {
            let angle = -4.0 * t * (theta + PI * (2.0 * s as f64 + kf) / nf).sin() * sin_k;
            sum += Complex64::from_polar(radial.exp(), angle);
        }
    }
    Ok(Complex64::new(1.0, 0.0) - sum * ((-2.0 * t).exp() / (nf * nf)))
}

/// Imaginary parts above this are reported as an error by
/// [`cycle_dqc_analytic`].
pub const RING_IMAG_TOL: f64 = 1e-10;

/// Real part of [`cycle_dqc_complex`], after checking the imaginary residue.
pub fn cycle_dqc_analytic(n: usize, theta: f64, t: f64) -> Result<f64> {
    let z = cycle_dqc_complex(n, theta, t)?;
    if z.im.abs() > RING_IMAG_TOL {
        return Err(WalkError::InvalidArgument(format!("imaginary residue {:e} in ring distance", z.im)));
    }
    Ok(z.re)
}

fn check_ring(n: usize) -> Result<()> {
    if n < 3 {
        return Err(WalkError::InvalidArgument(format!("ring needs n >= 3, got {n}")));
    }
    Ok(())
}

/// Even-`n` Condition-1 Hamiltonian on `K_n`: `[H]_1j = i`,
/// `[H]_jk = (-1)^{j+k} i` for `1 < j < k`, zero diagonal.
pub fn appendix_even(n: usize) -> Result<PhasedHamiltonian> {
    if n < 4 || n % 2 != 0 {
        return Err(WalkError::InvalidArgument(format!("even construction needs even n >= 4, got {n}")));
    }
    complete_from_entries(n, |j, k| {
        if j == 1 {
            Complex64::i()
        } else {
            Complex64::i() * if (j + k) % 2 == 0 { 1.0 } else { -1.0 }
        }
    })
}

/// Odd-`n` Condition-1 Hamiltonian on `K_n`: `[H]_1j = i`,
/// `[H]_jk = exp{2πi/(n-2) · [k - j + (n-3)/2]}` for `1 < j < k`, zero
/// diagonal.
pub fn appendix_odd(n: usize) -> Result<PhasedHamiltonian> {
    if n < 5 || n % 2 == 0 {
        return Err(WalkError::InvalidArgument(format!("odd construction needs odd n >= 5, got {n}")));
    }
    let step = TAU / (n as f64 - 2.0);
    let offset = (n as f64 - 3.0) / 2.0;
    complete_from_entries(n, |j, k| {
        if j == 1 {
            Complex64::i()
        } else {
            Complex64::from_polar(1.0, step * ((k - j) as f64 + offset))
        }
    })
}

/// Builds a zero-diagonal Hamiltonian on `K_n` from its upper-triangular
/// entries `[H]_jk`, `j < k` (1-based).
fn complete_from_entries(n: usize, entry: impl Fn(usize, usize) -> Complex64) -> Result<PhasedHamiltonian> {
    let g = Graph::complete(n)?;
    let phases = g.edges().iter().map(|&(j, k)| entry(j, k).arg()).collect();
    PhasedHamiltonian::new(g, crate::hamiltonian::Coupling::Adjacency, phases, vec![0.0; n])
}

/// Gauge with `χ_1 = 0`, `χ_k = π/2 - arg [H]_k1`, mapping every entry of
/// the first column to `i`.
pub fn first_column_gauge(h: &PhasedHamiltonian) -> Result<GaugeVector> {
    let n = h.n();
    let m = h.matrix();
    let mut chi = vec![0.0; n];
    for k in 1..n {
        let z = m[(k, 0)];
        if z.norm() == 0.0 {
            return Err(WalkError::InvalidArgument(format!("vertex {} is not linked to vertex 1", k + 1)));
        }
        chi[k] = FRAC_PI_2 - z.arg();
    }
    Ok(GaugeVector::new(chi))
}

pub fn gauge_fix_first_column(h: &PhasedHamiltonian) -> Result<PhasedHamiltonian> {
    h.apply_gauge(&first_column_gauge(h)?)
}

/// Zero-diagonal `K_n` Hamiltonian with every first-column entry equal to
/// `i`, used as the search Hamiltonian.
///
/// For `n ≥ 4` it is the gauge-fixed Condition-1 construction, for which
/// `exp(+iH t_f)` maps the flat state to `|1>`. Condition 1 cannot hold on
/// `K_3` (its residual is the modulus of a single unit entry), so `n = 2, 3`
/// fall back to `[H]_jk = i` on every link. That choice still has equal
/// average energy for `|1>` and the flat state.
pub fn search_hamiltonian(n: usize) -> Result<PhasedHamiltonian> {
    match n {
        0 | 1 => Err(WalkError::InvalidArgument(format!("search needs n >= 2, got {n}"))),
        2 | 3 => complete_from_entries(n, |_, _| Complex64::i()),
        _ if n % 2 == 0 => gauge_fix_first_column(&appendix_even(n)?),
        _ => gauge_fix_first_column(&appendix_odd(n)?),
    }
}

/// `cos(√(n-1) t) e_1 - (i/√(n-1)) sin(√(n-1) t) h` with the gauge-fixed
/// first column `h = (0, i, ..., i)`.
pub fn optimal_evolution_state(n: usize, t: f64) -> Result<AmplitudeVector> {
    if n < 2 {
        return Err(WalkError::InvalidArgument(format!("needs n >= 2, got {n}")));
    }
    let w = (n as f64 - 1.0).sqrt();
    let (s, c) = (w * t).sin_cos();
    let mut amps = vec![Complex64::new(s / w, 0.0); n];
    amps[0] = Complex64::new(c, 0.0);
    Ok(AmplitudeVector(amps))
}

/// Characteristic times of search on `K_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchTimes {
    pub n: usize,
    /// First time the optimal evolution reaches the flat state.
    pub t_f: f64,
    /// Time to reach the state orthogonal to `|1>`.
    pub t_h: f64,
    /// Grover time `π / (2√n)`.
    pub t_g: f64,
    /// Quantum speed limit between `|1>` and the flat state.
    pub tau_qsl: f64,
}

pub fn flat_hitting_time(n: usize) -> f64 {
    let nf = n as f64;
    (1.0 / nf.sqrt()).acos() / (nf - 1.0).sqrt()
}

pub fn orthogonal_time(n: usize) -> f64 {
    FRAC_PI_2 / (n as f64 - 1.0).sqrt()
}

pub fn grover_time(n: usize) -> f64 {
    FRAC_PI_2 / (n as f64).sqrt()
}

pub fn search_times(n: usize) -> Result<SearchTimes> {
    let h = search_hamiltonian(n)?;
    let qsl = qsl_bound(&h, &AmplitudeVector::localized(n, 1), &AmplitudeVector::flat(n))?;
    Ok(SearchTimes { n, t_f: flat_hitting_time(n), t_h: orthogonal_time(n), t_g: grover_time(n), tau_qsl: qsl.tau })
}

/// `1 - (1 - e^{-nt})/n - e^{-nt}(1 + cos(2√(n-1) t))/2`.
pub fn dqc_optimal_closed_form(n: usize, t: f64) -> Result<f64> {
    if n < 2 {
        return Err(WalkError::InvalidArgument(format!("needs n >= 2, got {n}")));
    }
    if t < 0.0 {
        return Err(WalkError::NegativeTime(t));
    }
    let nf = n as f64;
    let decay = (-nf * t).exp();
    Ok(1.0 - (1.0 - decay) / nf - decay * (1.0 + (2.0 * (nf - 1.0).sqrt() * t).cos()) / 2.0)
}

/// Both terms of the speed-limit bound and their maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QslBound {
    /// `arccos|<b|a>| / ΔH`.
    pub variance_term: f64,
    /// `2 arccos²|<b|a>| / (π (<H> - E_0))`.
    pub energy_term: f64,
    pub tau: f64,
    pub delta_h: f64,
    pub mean_energy: f64,
    pub ground_energy: f64,
}

/// Quantum speed limit for rotating `a` into `b` under `h`. The spread
/// `ΔH` and mean energy are taken on `a`; `E_0` is the numerically computed
/// ground energy.
pub fn qsl_bound(h: &PhasedHamiltonian, a: &AmplitudeVector, b: &AmplitudeVector) -> Result<QslBound> {
    let n = h.n();
    for s in [a, b] {
        if s.len() != n {
            return Err(WalkError::DimensionMismatch { expected: n, got: s.len() });
        }
    }
    let m = h.matrix();
    let energy = |s: &AmplitudeVector| -> (f64, f64) {
        let hs = m * s.to_dvector();
        let mean = s.entries().iter().zip(hs.iter()).map(|(x, y)| x.conj() * y).sum::<Complex64>().re;
        (mean, hs.norm_squared())
    };
    let (ea, ea2) = energy(a);
    let (eb, _) = energy(b);
    if (ea - eb).abs() > 1e-9 {
        return Err(WalkError::EnergyMismatch(ea, eb));
    }
    let delta_h = (ea2 - ea * ea).max(0.0).sqrt();
    let overlap = a.inner(b).norm().min(1.0);
    let angle = overlap.acos();
    let ground = SpectralDecomposition::of(h).ground_energy();
    let (variance_term, energy_term) = if angle == 0.0 {
        (0.0, 0.0)
    } else {
        (angle / delta_h, 2.0 * angle * angle / (PI * (ea - ground)))
    };
    Ok(QslBound {
        variance_term,
        energy_term,
        tau: variance_term.max(energy_term),
        delta_h,
        mean_energy: ea,
        ground_energy: ground,
    })
}

/// `H_G = L - n |1><1|` on `K_n`.
pub fn grover_hamiltonian(n: usize) -> Result<PhasedHamiltonian> {
    let h = PhasedHamiltonian::from_laplacian(&Graph::complete(n)?);
    let mut diag = h.diagonal().to_vec();
    diag[0] -= n as f64;
    h.with_diagonal(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{coherence_l1, ipr};
    use crate::propagation::evolve_localized;
    use crate::grid::TimeGrid;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ring_spectrum_values() {
        let (vals, vecs) = cycle_spectrum(4, 0.0).unwrap();
        let expected = [0.0, -2.0, 0.0, 2.0];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14);
        }
        // Bloch vectors are eigenvectors of the uniform ring.
        let h = PhasedHamiltonian::cycle(4, 0.0, 0.0).unwrap();
        for s in 0..4 {
            let v = vecs.column(s).into_owned();
            let hv = h.matrix() * &v;
            assert!((hv - v * c(vals[s], 0.0)).norm() < 1e-13);
        }
        let (vals, _) = cycle_spectrum(3, PI / 6.0).unwrap();
        for a in 0..3 {
            for b in a + 1..3 {
                assert!((vals[a] - vals[b]).abs() > 1e-3);
            }
        }
    }

    #[test]
    fn ring_probability_at_zero_time() {
        assert!((cycle_transition_prob(6, 0.2, 3, 3, 0.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(cycle_transition_prob(6, 0.2, 3, 4, 0.0).unwrap() < 1e-28);
        assert!(cycle_transition_prob(6, 0.2, 0, 4, 1.0).is_err());
    }

    #[test]
    fn ring_distance_at_zero() {
        assert!(cycle_dqc_analytic(9, 0.3, 0.0).unwrap().abs() < 1e-14);
        assert!(cycle_dqc_analytic(9, 0.3, -1.0).is_err());
    }

    #[test]
    fn printed_six_site_matrix() {
        let i = c(0.0, 1.0);
        let m = -i;
        #[rustfmt::skip]
        let printed = [
            [c(0.,0.), i, i, i, i, i],
            [m, c(0.,0.), m, i, m, i],
            [m, i, c(0.,0.), m, i, m],
            [m, m, i, c(0.,0.), m, i],
            [m, i, m, i, c(0.,0.), m],
            [m, m, i, m, i, c(0.,0.)],
        ];
        let h = appendix_even(6).unwrap();
        for r in 0..6 {
            for col in 0..6 {
                assert!((h.matrix()[(r, col)] - printed[r][col]).norm() < 1e-14, "({r}, {col})");
            }
        }
    }

    #[test]
    fn printed_five_site_matrix() {
        let i = c(0.0, 1.0);
        let m = -i;
        let w = Complex64::from_polar(1.0, TAU / 3.0);
        let wb = w.conj();
        let one = c(1.0, 0.0);
        let z = c(0.0, 0.0);
        let printed = [
            [z, i, i, i, i],
            [m, z, wb, one, w],
            [m, w, z, wb, one],
            [m, one, w, z, wb],
            [m, wb, one, w, z],
        ];
        let h = appendix_odd(5).unwrap();
        for r in 0..5 {
            for col in 0..5 {
                assert!((h.matrix()[(r, col)] - printed[r][col]).norm() < 1e-14, "({r}, {col})");
            }
        }
    }

    #[test]
    fn constructions_reject_wrong_parity() {
        assert!(appendix_even(5).is_err());
        assert!(appendix_even(2).is_err());
        assert!(appendix_odd(6).is_err());
        assert!(appendix_odd(3).is_err());
    }

    #[test]
    fn gauge_fixing_sets_first_column_to_i() {
        for n in [5, 6, 9] {
            let h = search_hamiltonian(n).unwrap();
            for k in 1..n {
                assert!((h.matrix()[(k, 0)] - Complex64::i()).norm() < 1e-14);
            }
            assert!(h.condition1_residual(1).unwrap() < 1e-12);
        }
    }

    #[test]
    fn optimal_state_passes_through_flat_state() {
        for n in [4, 7, 13] {
            let a = optimal_evolution_state(n, 0.0).unwrap();
            assert_eq!(a, AmplitudeVector::localized(n, 1));
            let f = optimal_evolution_state(n, flat_hitting_time(n)).unwrap();
            for z in f.entries() {
                assert!((z.norm() - 1.0 / (n as f64).sqrt()).abs() < 1e-14);
            }
            assert!((coherence_l1(&f) - (n as f64 - 1.0)).abs() < 1e-12);
            assert!((ipr(&f) - 1.0 / n as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn optimal_state_matches_propagation() {
        let h = gauge_fix_first_column(&appendix_even(6).unwrap()).unwrap();
        let grid = TimeGrid::from_points(vec![0.2, 0.5, 1.0]).unwrap();
        let amps = evolve_localized(&h, 1, &grid).unwrap();
        for (a, &t) in amps.iter().zip(grid.points()) {
            let closed = optimal_evolution_state(6, t).unwrap();
            for (x, y) in a.entries().iter().zip(closed.entries()) {
                assert!((x - y).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn search_time_values() {
        let s = search_times(4).unwrap();
        assert!((s.t_f - 0.5f64.acos() / 3f64.sqrt()).abs() < 1e-15);
        assert!((s.t_f - 0.604_599_788_078_072_6).abs() < 1e-12);
        assert!((s.t_g - PI / 4.0).abs() < 1e-15);
        assert!(s.t_f < s.t_g && s.t_g < s.t_h);

        let two = search_times(2).unwrap();
        assert!((two.t_f - PI / 4.0).abs() < 1e-15);
        assert!((two.tau_qsl - two.t_f).abs() < 1e-12);
    }

    #[test]
    fn optimal_distance_limits() {
        assert_eq!(dqc_optimal_closed_form(7, 0.0).unwrap(), 0.0);
        assert!((dqc_optimal_closed_form(7, 10.0).unwrap() - (1.0 - 1.0 / 7.0)).abs() < 1e-8);
        assert!(dqc_optimal_closed_form(7, -0.1).is_err());
    }

    #[test]
    fn qsl_trivial_and_mismatched() {
        let h = search_hamiltonian(6).unwrap();
        let one = AmplitudeVector::localized(6, 1);
        assert_eq!(qsl_bound(&h, &one, &one).unwrap().tau, 0.0);
        let lap = PhasedHamiltonian::from_laplacian(&Graph::complete(6).unwrap());
        assert!(matches!(
            qsl_bound(&lap, &one, &AmplitudeVector::flat(6)),
            Err(WalkError::EnergyMismatch(..))
        ));
    }

    #[test]
    fn qsl_on_flat_state_equals_hitting_time() {
        for n in 4..=16 {
            let h = search_hamiltonian(n).unwrap();
            let q = qsl_bound(&h, &AmplitudeVector::flat(n), &AmplitudeVector::localized(n, 1)).unwrap();
            assert!((q.delta_h - (n as f64 - 1.0).sqrt()).abs() < 1e-12);
            assert!((q.variance_term - flat_hitting_time(n)).abs() < 1e-12);
            assert!(q.energy_term < q.variance_term);
        }
    }

    #[test]
    fn grover_diagonal() {
        let h = grover_hamiltonian(5).unwrap();
        assert_eq!(h.diagonal(), &[-1.0, 4.0, 4.0, 4.0, 4.0]);
    }
}
