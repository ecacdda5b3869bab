//! Derivative-free optimization of the quantum-classical distance over edge
//! phases, and averages over random-phase ensembles.
//!
//! The search is a cyclic coordinate method: each sweep runs a bracketed
//! Brent line search along every edge phase in turn. Restarts begin from
//! seeded random phase vectors and run in parallel; each restart owns a
//! generator seeded from a master stream, so results do not depend on
//! scheduling.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, WalkError};
use crate::graph::Graph;
use crate::grid::TimeGrid;
use crate::hamiltonian::{wrap_angle, Coupling, PhasedHamiltonian};
use crate::metrics::{StartSeries, WalkPair};
use crate::propagation::{ClassicalWalk, SpectralDecomposition};

/// One angle per edge, in the graph's canonical edge order, wrapped to
/// `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<f64>);

impl PhaseVector {
    pub fn new(angles: Vec<f64>) -> Self {
        Self(angles.into_iter().map(wrap_angle).collect())
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0.0; m])
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `+1` maximizes the distance, `-1` minimizes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    pub fn sign(self) -> f64 {
        match self {
            Sense::Maximize => 1.0,
            Sense::Minimize => -1.0,
        }
    }
}

impl FromStr for Sense {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "max" | "maximize" | "+1" | "1" => Ok(Sense::Maximize),
            "min" | "minimize" | "-1" => Ok(Sense::Minimize),
            other => Err(WalkError::InvalidArgument(format!("unknown sense '{other}'"))),
        }
    }
}

/// Signed distance at a fixed time as a function of the edge phases.
///
/// The Hamiltonian has unit adjacency couplings `e^{iφ}` and zero diagonal;
/// the classical reference is the graph Laplacian walk, whose column at
/// `t_star` is computed once.
#[derive(Debug, Clone)]
pub struct Objective {
    graph: Graph,
    start: usize,
    t_star: f64,
    sign: f64,
    classical: Vec<f64>,
}

impl Objective {
    pub fn new(graph: &Graph, start: usize, t_star: f64, sense: Sense) -> Result<Self> {
        graph.check_vertex(start)?;
        if !(t_star.is_finite() && t_star > 0.0) {
            return Err(WalkError::InvalidArgument(format!("t_star must be positive, got {t_star}")));
        }
        let classical = ClassicalWalk::new(&graph.laplacian())?.column(start - 1, t_star)?;
        Ok(Self { graph: graph.clone(), start, t_star, sign: sense.sign(), classical })
    }

    pub fn hamiltonian(&self, phases: &[f64]) -> Result<PhasedHamiltonian> {
        PhasedHamiltonian::with_coupling(&self.graph, Coupling::Adjacency, phases.to_vec())
    }

    pub fn eval(&self, phases: &[f64]) -> Result<f64> {
        let h = self.hamiltonian(phases)?;
        let a = SpectralDecomposition::of(&h).column(self.start - 1, self.t_star);
        let overlap: f64 = self.classical.iter().zip(a.entries()).map(|(p, z)| p * z.norm_sqr()).sum();
        Ok(self.sign * (1.0 - overlap))
    }
}

/// `±D_QC^start(t_star)` for phases on `g` with zero diagonal.
pub fn objective_dqc(g: &Graph, phases: &PhaseVector, start: usize, t_star: f64, sense: Sense) -> Result<f64> {
    if phases.len() != g.edge_count() {
        return Err(WalkError::DimensionMismatch { expected: g.edge_count(), got: phases.len() });
    }
    Objective::new(g, start, t_star, sense)?.eval(phases.angles())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Objective evaluations allowed per restart, checked after each line
    /// search. The polish stage gets the same allowance again.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    pub t_star: f64,
    pub sense: Sense,
    /// Stop when no coordinate moves further than this in a sweep.
    pub step_tol: f64,
    /// Stop when a sweep improves the objective by less than this.
    pub f_tol: f64,
    /// Extra sweeps on the best restart until the gain drops below
    /// `polish_tol`. `None` disables polishing.
    pub polish_tol: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            budget: 200_000,
            restarts: 8,
            seed: 0,
            t_star: 0.3,
            sense: Sense::Maximize,
            step_tol: 1e-6,
            f_tol: 1e-10,
            polish_tol: Some(1e-15),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub best: PhaseVector,
    /// Signed objective `±D_QC` at `best`; nondecreasing along the search.
    pub objective: f64,
    /// Unsigned distance at `best`.
    pub dqc: f64,
    /// Evaluations summed over all restarts and the polish stage.
    pub evaluations: usize,
    /// `(evaluations, objective)` after each sweep of the winning restart.
    pub trace: Vec<(usize, f64)>,
    /// Condition-1 residual at the start vertex, for complete graphs.
    pub residual: Option<f64>,
    pub status: Status,
    /// Objective at each restart's random starting point.
    pub initial_objectives: Vec<f64>,
    pub restart_objectives: Vec<f64>,
}

impl fmt::Display for OptimizationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "objective {:.15e}", self.objective)?;
        writeln!(f, "dqc {:.15e}", self.dqc)?;
        writeln!(f, "evaluations {}", self.evaluations)?;
        match self.residual {
            Some(r) => writeln!(f, "residual {r:.15e}")?,
            None => writeln!(f, "residual none")?,
        }
        writeln!(f, "status {}", if self.status == Status::Converged { "converged" } else { "budget-exhausted" })?;
        let phases: Vec<String> = self.best.angles().iter().map(|a| format!("{a:.15e}")).collect();
        writeln!(f, "phases {}", phases.join(" "))
    }
}

struct Run {
    x: Vec<f64>,
    fx: f64,
    evaluations: usize,
    trace: Vec<(usize, f64)>,
    status: Status,
}

/// Best local optimum over `config.restarts` seeded random starts.
pub fn optimize_phases(g: &Graph, start: usize, config: &OptimizerConfig) -> Result<OptimizationResult> {
    if !g.is_connected() {
        return Err(WalkError::Disconnected);
    }
    if config.restarts == 0 || config.budget == 0 {
        return Err(WalkError::InvalidArgument("restarts and budget must be positive".into()));
    }
    let objective = Objective::new(g, start, config.t_star, config.sense)?;
    let m = g.edge_count();
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let seeds: Vec<u64> = (0..config.restarts).map(|_| master.random()).collect();

    let runs: Vec<Result<(f64, Run)>> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..TAU)).collect();
            let f0 = objective.eval(&x0)?;
            let run = coordinate_search(&objective, x0, f0, 1, config.budget, config.step_tol, config.f_tol)?;
            Ok((f0, run))
        })
        .collect();
    let mut initial = Vec::with_capacity(runs.len());
    let mut finals = Vec::with_capacity(runs.len());
    let mut best: Option<Run> = None;
    let mut total = 0;
    for r in runs {
        let (f0, run) = r?;
        initial.push(f0);
        finals.push(run.fx);
        total += run.evaluations;
        // Strict comparison keeps the earliest restart on ties.
        if best.as_ref().is_none_or(|b| run.fx > b.fx) {
            best = Some(run);
        }
    }
    let mut best = best.expect("at least one restart");

    if let Some(tol) = config.polish_tol {
        if best.status == Status::Converged {
            let offset = best.evaluations;
            let polished = coordinate_search(&objective, best.x.clone(), best.fx, 0, config.budget, 0.0, tol)?;
            total += polished.evaluations;
            best.trace.extend(polished.trace.iter().map(|&(e, f)| (e + offset, f)));
            best.status = polished.status;
            if polished.fx >= best.fx {
                best.x = polished.x;
                best.fx = polished.fx;
            }
        }
    }

    let phases = PhaseVector::new(best.x);
    let h = objective.hamiltonian(phases.angles())?;
    let residual = match h.condition1_residual(start) {
        Ok(r) => Some(r),
        Err(WalkError::NotComplete) => None,
        Err(e) => return Err(e),
    };
    let objective_value = objective.eval(phases.angles())?;
    Ok(OptimizationResult {
        best: phases,
        objective: objective_value,
        dqc: objective_value * config.sense.sign(),
        evaluations: total,
        trace: best.trace,
        residual,
        status: best.status,
        initial_objectives: initial,
        restart_objectives: finals,
    })
}

/// Cyclic coordinate ascent from `x` (with known value `fx`).
fn coordinate_search(
    objective: &Objective,
    mut x: Vec<f64>,
    mut fx: f64,
    initial_evals: usize,
    budget: usize,
    step_tol: f64,
    f_tol: f64,
) -> Result<Run> {
    let mut evaluations = initial_evals;
    let mut trace = vec![(evaluations, fx)];
    loop {
        let before = fx;
        let mut largest_move: f64 = 0.0;
        for i in 0..x.len() {
            let mut failure = None;
            let mut y = x.clone();
            let mut line = |v: f64| {
                y[i] = v;
                match objective.eval(&y) {
                    Ok(f) => -f,
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::INFINITY
                    }
                }
            };
            let (v, neg_f, used) = line_minimize(&mut line, x[i], 0.5);
            if let Some(e) = failure {
                return Err(e);
            }
            evaluations += used;
            if -neg_f > fx {
                largest_move = largest_move.max((v - x[i]).abs());
                x[i] = wrap_angle(v);
                fx = -neg_f;
            }
            if evaluations >= budget {
                trace.push((evaluations, fx));
                return Ok(Run { x, fx, evaluations, trace, status: Status::BudgetExhausted });
            }
        }
        trace.push((evaluations, fx));
        if fx - before < f_tol || largest_move < step_tol {
            return Ok(Run { x, fx, evaluations, trace, status: Status::Converged });
        }
    }
}

const GOLD: f64 = 1.618_033_988_749_895;
const CGOLD: f64 = 0.381_966_011_250_105;

/// Brackets a minimum starting from `[x0 - h, x0 + h]` by golden expansion
/// and refines it with Brent's method. Returns `(x, f(x), evaluations)`.
fn line_minimize(f: &mut impl FnMut(f64) -> f64, x0: f64, h: f64) -> (f64, f64, usize) {
    let mut evals = 0;
    let mut call = |x: f64, evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    let (mut a, mut b) = (x0 - h, x0 + h);
    let fa = call(a, &mut evals);
    let mut fb = call(b, &mut evals);
    if fb > fa {
        std::mem::swap(&mut a, &mut b);
        fb = fa;
    }
    let mut c = b + GOLD * (b - a);
    let mut fc = call(c, &mut evals);
    // The objective is periodic, so downhill expansion ends within a few
    // periods; the cap guards against flat directions.
    let mut expansions = 0;
    while fb > fc && expansions < 50 {
        a = b;
        b = c;
        fb = fc;
        c = b + GOLD * (b - a);
        fc = call(c, &mut evals);
        expansions += 1;
    }
    let (lo, hi) = if a < c { (a, c) } else { (c, a) };
    let (x, fx) = brent(|x| call(x, &mut evals), lo, hi, b, fb);
    (x, fx, evals)
}

/// Brent's parabolic/golden minimizer on `[a, b]` with interior point `x`.
fn brent(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, x0: f64, f0: f64) -> (f64, f64) {
    const TOL: f64 = 1e-10;
    const ZEPS: f64 = 1e-20;
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (f0, f0, f0);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for _ in 0..200 {
        let xm = 0.5 * (a + b);
        let tol1 = TOL * x.abs() + ZEPS;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(xm - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = CGOLD * e;
        }
        let u = if d.abs() >= tol1 { x + d } else { x + tol1.copysign(d) };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}

/// How random phases are assigned to the edges of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleRule {
    /// One uniform angle on every edge, oriented `j → k` with `j < k`.
    SinglePhase,
    /// Two uniform angles; each edge takes one of them with probability 1/2.
    TwoPhases,
    /// An independent uniform angle per edge.
    Independent,
}

impl EnsembleRule {
    pub fn name(self) -> &'static str {
        match self {
            EnsembleRule::SinglePhase => "single",
            EnsembleRule::TwoPhases => "two",
            EnsembleRule::Independent => "independent",
        }
    }

    fn draw(self, m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            EnsembleRule::SinglePhase => vec![rng.random_range(0.0..TAU); m],
            EnsembleRule::TwoPhases => {
                let pair = [rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)];
                (0..m).map(|_| pair[usize::from(rng.random::<bool>())]).collect()
            }
            EnsembleRule::Independent => (0..m).map(|_| rng.random_range(0.0..TAU)).collect(),
        }
    }
}

impl FromStr for EnsembleRule {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "single" => Ok(EnsembleRule::SinglePhase),
            "two" => Ok(EnsembleRule::TwoPhases),
            "independent" => Ok(EnsembleRule::Independent),
            other => Err(WalkError::InvalidArgument(format!("unknown ensemble rule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub rule: EnsembleRule,
    pub samples: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(rule: EnsembleRule, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(WalkError::InvalidArgument("ensemble needs at least one sample".into()));
        }
        Ok(Self { rule, samples, seed })
    }
}

/// Sample mean and standard error of the mean, pointwise on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSeries {
    pub mean: Vec<f64>,
    /// `NaN` when there is a single sample.
    pub std_err: Vec<f64>,
}

impl MeanSeries {
    fn from_samples(samples: &[&[f64]]) -> Self {
        let k = samples.len() as f64;
        let len = samples[0].len();
        let mut mean = vec![0.0; len];
        let mut std_err = vec![0.0; len];
        for i in 0..len {
            let m = samples.iter().map(|s| s[i]).sum::<f64>() / k;
            let var = samples.iter().map(|s| (s[i] - m).powi(2)).sum::<f64>() / (k - 1.0);
            mean[i] = m;
            std_err[i] = if samples.len() > 1 { (var / k).sqrt() } else { f64::NAN };
        }
        Self { mean, std_err }
    }
}

/// Ensemble averages from start vertex 1, with the zero-phase Laplacian
/// walk as baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleAverage {
    pub grid: TimeGrid,
    pub spec: EnsembleSpec,
    pub dqc: MeanSeries,
    pub coherence: MeanSeries,
    pub ipr: MeanSeries,
    /// Mean distance minus the baseline distance; shares `dqc.std_err`.
    pub delta_dqc: Vec<f64>,
    pub baseline: StartSeries,
}

/// Averages distance, coherence and IPR over random-phase Hamiltonians with
/// Laplacian coupling `D - Σ e^{iφ}`.
pub fn random_ensemble(g: &Graph, spec: &EnsembleSpec, grid: &TimeGrid) -> Result<EnsembleAverage> {
    if spec.samples == 0 {
        return Err(WalkError::InvalidArgument("ensemble needs at least one sample".into()));
    }
    let laplacian = g.laplacian();
    let m = g.edge_count();
    let mut master = ChaCha8Rng::seed_from_u64(spec.seed);
    let seeds: Vec<u64> = (0..spec.samples).map(|_| master.random()).collect();
    let samples: Vec<StartSeries> = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = PhasedHamiltonian::with_coupling(g, Coupling::Laplacian, spec.rule.draw(m, &mut rng))?;
            StartSeries::compute(&WalkPair::with_laplacian(&h, &laplacian)?, 1, grid)
        })
        .collect::<Result<_>>()?;
    let baseline = StartSeries::compute(&WalkPair::new(&PhasedHamiltonian::from_laplacian(g))?, 1, grid)?;
    let collect = |f: fn(&StartSeries) -> &[f64]| {
        MeanSeries::from_samples(&samples.iter().map(f).collect::<Vec<_>>())
    };
    let dqc = collect(|s| &s.dqc);
    let delta_dqc = dqc.mean.iter().zip(&baseline.dqc).map(|(a, b)| a - b).collect();
    Ok(EnsembleAverage {
        grid: grid.clone(),
        spec: *spec,
        coherence: collect(|s| &s.coherence),
        ipr: collect(|s| &s.ipr),
        dqc,
        delta_dqc,
        baseline,
    })
}
