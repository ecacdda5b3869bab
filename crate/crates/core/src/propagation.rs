//! Quantum and classical propagators from a single eigendecomposition.
//!
//! The quantum walk uses `U(t) = V exp(-iΛt) V†`, the classical walk uses
//! the heat kernel `exp(-tL)`. Both factorizations are computed once and
//! reused across the whole time grid.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::grid::TimeGrid;
use crate::hamiltonian::{hermitian_deviation, PhasedHamiltonian};

const HERMITIAN_TOL: f64 = 1e-12;
const EIG_EPS: f64 = 1e-15;
const EIG_MAX_ITER: usize = 10_000;

/// Real eigenvalues (ascending) and unitary eigenvectors (as columns) of a
/// Hermitian matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

/// Eigendecomposition of a complex Hermitian matrix.
pub fn hermitian_eig(m: &DMatrix<Complex64>) -> Result<SpectralDecomposition> {
    SpectralDecomposition::new(m)
}

impl SpectralDecomposition {
    pub fn new(m: &DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(WalkError::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let deviation = hermitian_deviation(m);
        if deviation > HERMITIAN_TOL * scale {
            return Err(WalkError::NotHermitian { deviation });
        }
        let eig = SymmetricEigen::try_new(m.clone(), EIG_EPS, EIG_MAX_ITER)
            .ok_or(WalkError::NoConvergence { iterations: EIG_MAX_ITER })?;

        let n = m.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { eigenvalues, eigenvectors })
    }

    pub fn of(h: &PhasedHamiltonian) -> Self {
        Self::new(h.matrix()).expect("assembled Hamiltonians are Hermitian")
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let v = &self.eigenvectors;
        let scaled = DMatrix::from_fn(self.n(), self.n(), |r, c| v[(r, c)] * self.eigenvalues[c]);
        scaled * v.adjoint()
    }

    /// `exp(-iHt)`.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let v = &self.eigenvectors;
        let phased = DMatrix::from_fn(self.n(), self.n(), |r, c| {
            v[(r, c)] * Complex64::from_polar(1.0, -self.eigenvalues[c] * t)
        });
        phased * v.adjoint()
    }

    /// `exp(-iHt) ψ`.
    pub fn evolve(&self, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
        let coeffs = self.eigenvectors.adjoint() * psi;
        let rotated = DVector::from_iterator(
            self.n(),
            coeffs.iter().zip(&self.eigenvalues).map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t)),
        );
        &self.eigenvectors * rotated
    }

    /// Amplitudes `α_kj(t) = <k| exp(-iHt) |j>` for 0-based `start = j`.
    pub fn column(&self, start: usize, t: f64) -> AmplitudeVector {
        let v = &self.eigenvectors;
        let n = self.n();
        let weights: Vec<Complex64> = (0..n)
            .map(|c| v[(start, c)].conj() * Complex64::from_polar(1.0, -self.eigenvalues[c] * t))
            .collect();
        AmplitudeVector((0..n).map(|k| (0..n).map(|c| v[(k, c)] * weights[c]).sum()).collect())
    }
}

/// `exp(-iHt)` from a precomputed decomposition.
pub fn quantum_propagator(sd: &SpectralDecomposition, t: f64) -> DMatrix<Complex64> {
    sd.propagator(t)
}

/// Site amplitudes of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector(pub Vec<Complex64>);

impl AmplitudeVector {
    pub fn localized(n: usize, vertex: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[vertex - 1] = Complex64::new(1.0, 0.0);
        Self(v)
    }

    /// Equal-weight superposition with all relative phases zero.
    pub fn flat(n: usize) -> Self {
        Self(vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n])
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_dvector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.0)
    }
}

/// Spectral factorization of a graph Laplacian driving the classical
/// continuous-time random walk `p(t) = exp(-tL) p(0)`.
#[derive(Debug, Clone)]
pub struct ClassicalWalk {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl ClassicalWalk {
    pub fn new(laplacian: &DMatrix<f64>) -> Result<Self> {
        let n = laplacian.nrows();
        if laplacian.ncols() != n {
            return Err(WalkError::DimensionMismatch { expected: n, got: laplacian.ncols() });
        }
        let asym = (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .map(|(j, k)| (laplacian[(j, k)] - laplacian[(k, j)]).abs())
            .fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(WalkError::NotHermitian { deviation: asym });
        }
        if laplacian.row_iter().any(|r| r.sum().abs() > 1e-9) {
            return Err(WalkError::InvalidArgument("Laplacian rows must sum to zero".into()));
        }
        let eig = SymmetricEigen::try_new(laplacian.clone(), EIG_EPS, EIG_MAX_ITER)
            .ok_or(WalkError::NoConvergence { iterations: EIG_MAX_ITER })?;
        Ok(Self { eigenvalues: eig.eigenvalues.iter().copied().collect(), eigenvectors: eig.eigenvectors })
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `exp(-tL)`; negative entries from roundoff are clamped to zero.
    pub fn propagator(&self, t: f64) -> Result<DMatrix<f64>> {
        check_time(t)?;
        let v = &self.eigenvectors;
        let scaled = DMatrix::from_fn(self.n(), self.n(), |r, c| v[(r, c)] * (-self.eigenvalues[c] * t).exp());
        Ok((scaled * v.transpose()).map(|x| x.max(0.0)))
    }

    /// `p_kj(t)` for 0-based `start = j`.
    pub fn column(&self, start: usize, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        let v = &self.eigenvectors;
        let n = self.n();
        let weights: Vec<f64> = (0..n).map(|c| v[(start, c)] * (-self.eigenvalues[c] * t).exp()).collect();
        Ok((0..n).map(|k| (0..n).map(|c| v[(k, c)] * weights[c]).sum::<f64>().max(0.0)).collect())
    }
}

fn check_time(t: f64) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(WalkError::NegativeTime(t));
    }
    Ok(())
}

/// `exp(-tL)`, bistochastic for `t ≥ 0`.
pub fn classical_propagator(laplacian: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    check_time(t)?;
    ClassicalWalk::new(laplacian)?.propagator(t)
}

/// Amplitudes from the localized state `|start>` (1-based) at every grid
/// time, sharing one eigendecomposition.
pub fn evolve_localized(h: &PhasedHamiltonian, start: usize, grid: &TimeGrid) -> Result<Vec<AmplitudeVector>> {
    h.graph().check_vertex(start)?;
    let sd = SpectralDecomposition::of(h);
    Ok(grid.points().iter().map(|&t| sd.column(start - 1, t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expm::{heat_kernel_taylor, unitary_taylor};
    use crate::graph::Graph;
    use std::f64::consts::PI;

    fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
        m.map(|x| Complex64::new(x, 0.0))
    }

    #[test]
    fn pauli_x_spectrum() {
        let sd = hermitian_eig(&complex(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]))).unwrap();
        assert!((sd.eigenvalues()[0] + 1.0).abs() < 1e-14);
        assert!((sd.eigenvalues()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn four_cycle_spectrum() {
        let sd = SpectralDecomposition::of(&PhasedHamiltonian::cycle(4, 0.0, 0.0).unwrap());
        for (got, want) in sd.eigenvalues().iter().zip([-2.0, 0.0, 0.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_graph_spectrum_matches_characteristic_polynomial() {
        // det(λI - A) for K_5 is (λ - 4)(λ + 1)^4; check roots by evaluating
        // the determinant numerically at each computed eigenvalue.
        let a = Graph::complete(5).unwrap().adjacency();
        let sd = hermitian_eig(&complex(&a)).unwrap();
        let expected = [-1.0, -1.0, -1.0, -1.0, 4.0];
        for (got, want) in sd.eigenvalues().iter().zip(expected) {
            assert!((got - want).abs() < 1e-12);
            let shifted = DMatrix::<f64>::identity(5, 5) * want - &a;
            assert!(shifted.determinant().abs() < 1e-9);
        }
    }

    #[test]
    fn decomposition_invariants() {
        let h = PhasedHamiltonian::with_coupling(
            &Graph::switch(),
            crate::hamiltonian::Coupling::Adjacency,
            (0..12).map(|i| 0.9 * i as f64).collect(),
        )
        .unwrap();
        let sd = SpectralDecomposition::of(&h);
        let scale = h.matrix().iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(max_abs_diff(&sd.reconstruct(), h.matrix()) <= 1e-10 * scale);
        let gram = sd.eigenvectors().adjoint() * sd.eigenvectors();
        assert!(max_abs_diff(&gram, &DMatrix::identity(12, 12)) <= 1e-10);
        assert!(sd.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        let again = SpectralDecomposition::of(&h);
        assert_eq!(again.eigenvalues(), sd.eigenvalues());
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = complex(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]));
        assert!(matches!(hermitian_eig(&m), Err(WalkError::NotHermitian { .. })));
    }

    #[test]
    fn propagator_at_zero_is_identity() {
        let sd = SpectralDecomposition::of(&PhasedHamiltonian::cycle(6, 0.3, 0.0).unwrap());
        assert!(max_abs_diff(&quantum_propagator(&sd, 0.0), &DMatrix::identity(6, 6)) < 1e-13);
        let l = Graph::cycle(6).unwrap().laplacian();
        let p = classical_propagator(&l, 0.0).unwrap();
        assert!((p - DMatrix::<f64>::identity(6, 6)).abs().max() < 1e-13);
    }

    #[test]
    fn rabi_oscillation() {
        let sd = SpectralDecomposition::of(&PhasedHamiltonian::from_adjacency(&Graph::complete(2).unwrap()));
        let a = sd.column(0, PI / 2.0);
        assert!((a.0[1].norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn cube_antipodal_transfer_matches_taylor_oracle() {
        let h = PhasedHamiltonian::from_adjacency(&Graph::hypercube(3).unwrap());
        let oracle = unitary_taylor(h.matrix(), PI / 2.0);
        assert!((oracle[(7, 0)].norm_sqr() - 1.0).abs() < 1e-12);
        let u = SpectralDecomposition::of(&h).propagator(PI / 2.0);
        assert!(max_abs_diff(&u, &oracle) < 1e-9);
    }

    #[test]
    fn two_state_classical_walk() {
        let l = Graph::complete(2).unwrap().laplacian();
        for t in [0.1, 0.5, 2.0] {
            let p = classical_propagator(&l, t).unwrap();
            let closed = (1.0 + (-2.0 * t).exp()) / 2.0;
            assert!((p[(0, 0)] - closed).abs() < 1e-13);
            assert!((heat_kernel_taylor(&l, t)[(0, 0)] - closed).abs() < 1e-13);
        }
    }

    #[test]
    fn complete_graph_relaxes_to_uniform() {
        for n in [3, 5, 9] {
            let l = Graph::complete(n).unwrap().laplacian();
            let p = classical_propagator(&l, 50.0 / n as f64).unwrap();
            assert!(p.iter().all(|x| (x - 1.0 / n as f64).abs() < 1e-8));
        }
    }

    #[test]
    fn classical_rejects_negative_time() {
        let l = Graph::cycle(4).unwrap().laplacian();
        assert_eq!(classical_propagator(&l, -0.1), Err(WalkError::NegativeTime(-0.1)));
        assert!(ClassicalWalk::new(&Graph::cycle(4).unwrap().adjacency()).is_err());
    }

    #[test]
    fn evolve_from_delta() {
        let h = PhasedHamiltonian::cycle(5, 0.0, 0.0).unwrap();
        let amps = evolve_localized(&h, 2, &TimeGrid::from_points(vec![0.0]).unwrap()).unwrap();
        for (k, p) in amps[0].probabilities().into_iter().enumerate() {
            assert!((p - if k == 1 { 1.0 } else { 0.0 }).abs() < 1e-14);
        }
        assert!(evolve_localized(&h, 6, &TimeGrid::from_points(vec![0.0]).unwrap()).is_err());
    }

    #[test]
    fn five_cycle_reflection_symmetry() {
        let h = PhasedHamiltonian::cycle(5, 0.0, 0.0).unwrap();
        let grid = TimeGrid::uniform(10.0, 0.1).unwrap();
        for a in evolve_localized(&h, 1, &grid).unwrap() {
            let p = a.probabilities();
            // site k and site (7 - k) mod 5 mirror each other around site 1
            assert!((p[1] - p[4]).abs() < 1e-12);
            assert!((p[2] - p[3]).abs() < 1e-12);
        }
    }

    #[test]
    fn evolve_matches_column() {
        let h = PhasedHamiltonian::cycle(7, 0.4, 0.0).unwrap();
        let sd = SpectralDecomposition::of(&h);
        let psi = AmplitudeVector::localized(7, 3).to_dvector();
        let a = sd.evolve(&psi, 1.3);
        let b = sd.column(2, 1.3);
        for (x, y) in a.iter().zip(&b.0) {
            assert!((x - y).norm() < 1e-13);
        }
    }
}
