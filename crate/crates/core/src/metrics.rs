//! Quantum-classical distance, 1-norm coherence and inverse participation
//! ratio for walks started on a single vertex.

use nalgebra::DMatrix;

use crate::error::{Result, WalkError};
use crate::grid::TimeGrid;
use crate::hamiltonian::PhasedHamiltonian;
use crate::propagation::{AmplitudeVector, ClassicalWalk, SpectralDecomposition};

/// A quantum walk and the classical walk it is compared against, both
/// factorized once.
#[derive(Debug, Clone)]
pub struct WalkPair {
    quantum: SpectralDecomposition,
    classical: ClassicalWalk,
}

impl WalkPair {
    /// Pairs `h` with the Laplacian of its own graph.
    pub fn new(h: &PhasedHamiltonian) -> Result<Self> {
        Self::with_laplacian(h, &h.graph().laplacian())
    }

    pub fn with_laplacian(h: &PhasedHamiltonian, laplacian: &DMatrix<f64>) -> Result<Self> {
        if laplacian.nrows() != h.n() {
            return Err(WalkError::DimensionMismatch { expected: h.n(), got: laplacian.nrows() });
        }
        Ok(Self { quantum: SpectralDecomposition::of(h), classical: ClassicalWalk::new(laplacian)? })
    }

    pub fn n(&self) -> usize {
        self.quantum.n()
    }

    pub fn quantum(&self) -> &SpectralDecomposition {
        &self.quantum
    }

    pub fn classical(&self) -> &ClassicalWalk {
        &self.classical
    }

    /// `D_QC^j(t)` for 0-based start `j`.
    pub fn dqc(&self, start: usize, t: f64) -> Result<f64> {
        let p = self.classical.column(start, t)?;
        let a = self.quantum.column(start, t);
        Ok(distance(&p, &a))
    }

    /// `D_QC^j(t)` for every start at once.
    pub fn dqc_all_starts(&self, t: f64) -> Result<Vec<f64>> {
        let p = self.classical.propagator(t)?;
        let u = self.quantum.propagator(t);
        let n = self.n();
        Ok((0..n)
            .map(|j| 1.0 - (0..n).map(|k| p[(k, j)] * u[(k, j)].norm_sqr()).sum::<f64>())
            .collect())
    }
}

fn distance(p: &[f64], a: &AmplitudeVector) -> f64 {
    1.0 - p.iter().zip(a.entries()).map(|(pk, ak)| pk * ak.norm_sqr()).sum::<f64>()
}

/// `D_QC^start(t) = 1 - Σ_k p_k,start(t) |α_k,start(t)|²` with a 1-based start.
pub fn dqc_at(h: &PhasedHamiltonian, laplacian: &DMatrix<f64>, start: usize, t: f64) -> Result<f64> {
    h.graph().check_vertex(start)?;
    if t < 0.0 {
        return Err(WalkError::NegativeTime(t));
    }
    WalkPair::with_laplacian(h, laplacian)?.dqc(start - 1, t)
}

pub fn dqc_series(h: &PhasedHamiltonian, laplacian: &DMatrix<f64>, start: usize, grid: &TimeGrid) -> Result<Vec<f64>> {
    h.graph().check_vertex(start)?;
    let pair = WalkPair::with_laplacian(h, laplacian)?;
    grid.points().iter().map(|&t| pair.dqc(start - 1, t)).collect()
}

/// `max_j D_QC^j(t)` at every grid time.
pub fn dqc_max(h: &PhasedHamiltonian, laplacian: &DMatrix<f64>, grid: &TimeGrid) -> Result<Vec<f64>> {
    let pair = WalkPair::with_laplacian(h, laplacian)?;
    grid.points()
        .iter()
        .map(|&t| Ok(pair.dqc_all_starts(t)?.into_iter().fold(f64::NEG_INFINITY, f64::max)))
        .collect()
}

/// `(Σ_k |α_k|)² - 1`.
pub fn coherence_l1(amps: &AmplitudeVector) -> f64 {
    let s: f64 = amps.entries().iter().map(|z| z.norm()).sum();
    s * s - 1.0
}

/// `Σ_k |α_k|⁴`.
pub fn ipr(amps: &AmplitudeVector) -> f64 {
    amps.entries().iter().map(|z| z.norm_sqr().powi(2)).sum()
}

/// Second-order small-`t` coefficients for a walk started at `start`.
///
/// ```text
/// D_QC(t) ≈ dqc_linear·t + dqc_quadratic·t²
/// C(t)    ≈ coh_linear·t + coh_quadratic·t²
/// I(t)    ≈ 1 + ipr_quadratic·t²
/// ```
///
/// `coh_quadratic = d(d-1) + Σ |[H²]_jk|` over vertices `k` at distance two
/// from `j`. Each such `|[H²]_jk|` sums the phase factors of the two-step
/// paths from `j` to `k`, so loops of length four carrying flux make it
/// phase dependent.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortTimeCoefficients {
    pub start: usize,
    pub degree: usize,
    pub dqc_linear: f64,
    pub dqc_quadratic: f64,
    pub coh_linear: f64,
    pub coh_quadratic: f64,
    pub ipr_quadratic: f64,
}

impl ShortTimeCoefficients {
    pub fn dqc(&self, t: f64) -> f64 {
        self.dqc_linear * t + self.dqc_quadratic * t * t
    }

    pub fn coherence(&self, t: f64) -> f64 {
        self.coh_linear * t + self.coh_quadratic * t * t
    }

    pub fn ipr(&self, t: f64) -> f64 {
        1.0 + self.ipr_quadratic * t * t
    }
}

pub fn short_time_coeffs(h: &PhasedHamiltonian, start: usize) -> Result<ShortTimeCoefficients> {
    h.graph().check_vertex(start)?;
    let j = start - 1;
    let m = h.matrix();
    let n = h.n();
    let degree = h.graph().degree(start);
    let d = degree as f64;
    let square = m * m;
    let two_step: f64 = (0..n)
        .filter(|&k| k != j && m[(j, k)].norm() == 0.0)
        .map(|k| square[(j, k)].norm())
        .sum();
    Ok(ShortTimeCoefficients {
        start,
        degree,
        dqc_linear: d,
        dqc_quadratic: -d * (d - 1.0) / 2.0,
        coh_linear: 2.0 * d,
        coh_quadratic: d * (d - 1.0) + two_step,
        ipr_quadratic: -2.0 * d,
    })
}

/// Which distance series a Δ-series is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartChoice {
    /// A fixed 1-based starting vertex.
    Vertex(usize),
    /// The maximum over starting vertices.
    Max,
}

/// Pointwise difference of two series sampled on the same grid.
pub fn delta_series(series: &[f64], baseline: &[f64]) -> Result<Vec<f64>> {
    if series.len() != baseline.len() {
        return Err(WalkError::InvalidGrid(format!(
            "series lengths differ: {} vs {}",
            series.len(),
            baseline.len()
        )));
    }
    Ok(series.iter().zip(baseline).map(|(a, b)| a - b).collect())
}

/// `D_QC(t; h) - D_QC(t; h0)` on a shared grid.
pub fn delta_dqc(
    h: &PhasedHamiltonian,
    h0: &PhasedHamiltonian,
    laplacian: &DMatrix<f64>,
    grid: &TimeGrid,
    start: StartChoice,
) -> Result<Vec<f64>> {
    if h.graph() != h0.graph() {
        return Err(WalkError::InvalidArgument("Hamiltonians live on different graphs".into()));
    }
    let series = |ham: &PhasedHamiltonian| match start {
        StartChoice::Vertex(v) => dqc_series(ham, laplacian, v, grid),
        StartChoice::Max => dqc_max(ham, laplacian, grid),
    };
    delta_series(&series(h)?, &series(h0)?)
}

/// Distance, coherence, IPR and site probabilities for one starting vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct StartSeries {
    pub start: usize,
    pub dqc: Vec<f64>,
    pub coherence: Vec<f64>,
    pub ipr: Vec<f64>,
    pub site_probs: Vec<Vec<f64>>,
}

impl StartSeries {
    pub fn compute(pair: &WalkPair, start: usize, grid: &TimeGrid) -> Result<Self> {
        if start == 0 || start > pair.n() {
            return Err(WalkError::VertexOutOfRange { vertex: start, n: pair.n() });
        }
        let mut out = Self { start, dqc: vec![], coherence: vec![], ipr: vec![], site_probs: vec![] };
        for &t in grid.points() {
            let a = pair.quantum().column(start - 1, t);
            let p = pair.classical().column(start - 1, t)?;
            out.dqc.push(distance(&p, &a));
            out.coherence.push(coherence_l1(&a));
            out.ipr.push(ipr(&a));
            out.site_probs.push(a.probabilities());
        }
        Ok(out)
    }
}

/// Full metric bundle on a grid: distance for every start, its maximum, and
/// coherence/IPR/probabilities for one chosen start.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSeries {
    pub grid: TimeGrid,
    /// `dqc_per_start[j][i]` is `D_QC^{j+1}` at grid point `i`.
    pub dqc_per_start: Vec<Vec<f64>>,
    pub dqc_max: Vec<f64>,
    pub chosen: StartSeries,
}

impl MetricSeries {
    pub fn compute(h: &PhasedHamiltonian, laplacian: &DMatrix<f64>, grid: &TimeGrid, start: usize) -> Result<Self> {
        h.graph().check_vertex(start)?;
        let pair = WalkPair::with_laplacian(h, laplacian)?;
        let n = pair.n();
        let mut per_start = vec![Vec::with_capacity(grid.len()); n];
        let mut max = Vec::with_capacity(grid.len());
        for &t in grid.points() {
            let all = pair.dqc_all_starts(t)?;
            max.push(all.iter().copied().fold(f64::NEG_INFINITY, f64::max));
            for (series, v) in per_start.iter_mut().zip(all) {
                series.push(v);
            }
        }
        let chosen = StartSeries::compute(&pair, start, grid)?;
        Ok(Self { grid: grid.clone(), dqc_per_start: per_start, dqc_max: max, chosen })
    }
}
