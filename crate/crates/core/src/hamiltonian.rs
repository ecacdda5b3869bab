//! Hermitian Hamiltonians compatible with a graph topology.
//!
//! A [`PhasedHamiltonian`] stores one phase per edge in the canonical edge
//! order (`j < k`) and assembles
//!
//! ```text
//! [H]_jk = s · exp(i φ_jk)   for j < k linked,
//! [H]_kj = conj([H]_jk),
//! [H]_jj = d_j,
//! ```
//!
//! where `s = +1` for the adjacency coupling and `s = -1` for the Laplacian
//! coupling. With all phases zero the two couplings reproduce `A` and `-A`
//! off the diagonal, so `from_laplacian` yields exactly `L = D - A`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::graph::Graph;

/// Default tolerance for angle comparisons.
pub const ANGLE_TOL: f64 = 1e-10;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TAU - d)
}

/// Sign of the off-diagonal hopping term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `[H]_jk = +exp(iφ_jk)`.
    Adjacency,
    /// `[H]_jk = -exp(iφ_jk)`.
    Laplacian,
}

impl Coupling {
    pub fn sign(self) -> f64 {
        match self {
            Coupling::Adjacency => 1.0,
            Coupling::Laplacian => -1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Coupling::Adjacency => "adjacency",
            Coupling::Laplacian => "laplacian",
        }
    }
}

impl FromStr for Coupling {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacency" => Ok(Coupling::Adjacency),
            "laplacian" => Ok(Coupling::Laplacian),
            other => Err(WalkError::InvalidArgument(format!("unknown coupling `{other}`"))),
        }
    }
}

/// Per-vertex angles of a diagonal unitary `D = diag(exp(iχ_j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeVector(Vec<f64>);

impl GaugeVector {
    pub fn new(angles: Vec<f64>) -> Self {
        Self(angles.into_iter().map(wrap_angle).collect())
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
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

#[derive(Debug, Clone, PartialEq)]
pub struct PhasedHamiltonian {
    graph: Graph,
    coupling: Coupling,
    phases: Vec<f64>,
    diagonal: Vec<f64>,
    matrix: DMatrix<Complex64>,
}

impl PhasedHamiltonian {
    /// Assembles a Hamiltonian from per-edge phases (canonical edge order)
    /// and on-site energies.
    pub fn new(graph: Graph, coupling: Coupling, phases: Vec<f64>, diagonal: Vec<f64>) -> Result<Self> {
        if phases.len() != graph.edge_count() {
            return Err(WalkError::DimensionMismatch { expected: graph.edge_count(), got: phases.len() });
        }
        if diagonal.len() != graph.n() {
            return Err(WalkError::DimensionMismatch { expected: graph.n(), got: diagonal.len() });
        }
        if let Some(bad) = phases.iter().chain(&diagonal).find(|x| !x.is_finite()) {
            return Err(WalkError::InvalidArgument(format!("non-finite entry {bad}")));
        }
        let phases: Vec<f64> = phases.into_iter().map(wrap_angle).collect();
        let matrix = assemble(&graph, coupling, &phases, &diagonal);
        Ok(Self { graph, coupling, phases, diagonal, matrix })
    }

    /// `H = L`: Laplacian coupling, zero phases, degrees on the diagonal.
    pub fn from_laplacian(graph: &Graph) -> Self {
        let diagonal = graph.degrees().into_iter().map(|d| d as f64).collect();
        Self::new(graph.clone(), Coupling::Laplacian, vec![0.0; graph.edge_count()], diagonal)
            .expect("sizes match by construction")
    }

    /// `H = A`: adjacency coupling, zero phases, zero diagonal.
    pub fn from_adjacency(graph: &Graph) -> Self {
        Self::new(graph.clone(), Coupling::Adjacency, vec![0.0; graph.edge_count()], vec![0.0; graph.n()])
            .expect("sizes match by construction")
    }

    /// Phase vector on top of either coupling, with the diagonal that
    /// coupling implies (degrees for Laplacian, zero for adjacency).
    pub fn with_coupling(graph: &Graph, coupling: Coupling, phases: Vec<f64>) -> Result<Self> {
        let diagonal = match coupling {
            Coupling::Adjacency => vec![0.0; graph.n()],
            Coupling::Laplacian => graph.degrees().into_iter().map(|d| d as f64).collect(),
        };
        Self::new(graph.clone(), coupling, phases, diagonal)
    }

    /// Ring Hamiltonian with `[H]_{j,j+1} = exp(iθ)` cyclically (including
    /// `[H]_{n,1}`) and constant diagonal `d`.
    pub fn cycle(n: usize, theta: f64, d: f64) -> Result<Self> {
        if n < 3 {
            return Err(cycle_size_error(n));
        }
        Self::cycle_with_phases(&vec![theta; n], d)
    }

    /// Ring Hamiltonian with `[H]_{j,j+1} = exp(iφ_j)` for `j < n` and
    /// `[H]_{n,1} = exp(iφ_n)`.
    pub fn cycle_with_phases(link_phases: &[f64], d: f64) -> Result<Self> {
        let n = link_phases.len();
        let graph = Graph::cycle(n).map_err(|_| cycle_size_error(n))?;
        let mut phases = vec![0.0; n];
        for (j, &phi) in link_phases.iter().enumerate() {
            let (a, b) = (j + 1, (j + 1) % n + 1);
            let idx = graph.edge_index(a, b).expect("ring edge");
            // Stored orientation is (min, max); the closing link (n, 1) is reversed.
            phases[idx] = if a < b { phi } else { -phi };
        }
        Self::new(graph, Coupling::Adjacency, phases, vec![d; n])
    }

    /// The 12-site switch with a single phase `φ` on the link from 5 to 6
    /// (the triangle side opposite the input arm). Under the Laplacian
    /// coupling that entry is `-e^{iφ}`.
    pub fn switch(coupling: Coupling, phi: f64) -> Self {
        let graph = Graph::switch();
        let mut phases = vec![0.0; graph.edge_count()];
        phases[graph.edge_index(5, 6).expect("switch has edge 5-6")] = phi;
        Self::with_coupling(&graph, coupling, phases).expect("sizes match by construction")
    }

    /// Reads phases off a dense Hermitian matrix whose off-diagonal support
    /// matches `graph` with unit-modulus entries. The result uses the
    /// adjacency coupling.
    pub fn from_matrix(graph: &Graph, m: &DMatrix<Complex64>, tol: f64) -> Result<Self> {
        let n = graph.n();
        if m.nrows() != n || m.ncols() != n {
            return Err(WalkError::DimensionMismatch { expected: n, got: m.nrows() });
        }
        let dev = hermitian_deviation(m);
        if dev > tol {
            return Err(WalkError::NotHermitian { deviation: dev });
        }
        for j in 0..n {
            for k in j + 1..n {
                let z = m[(j, k)];
                let linked = graph.has_edge(j + 1, k + 1);
                let expected = if linked { 1.0 } else { 0.0 };
                if (z.norm() - expected).abs() > tol {
                    return Err(WalkError::InvalidArgument(format!(
                        "entry ({}, {}) has modulus {} but the topology requires {expected}",
                        j + 1,
                        k + 1,
                        z.norm()
                    )));
                }
            }
        }
        let phases = graph.edges().iter().map(|&(j, k)| m[(j - 1, k - 1)].arg()).collect();
        let diagonal = (0..n).map(|j| m[(j, j)].re).collect();
        Self::new(graph.clone(), Coupling::Adjacency, phases, diagonal)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    /// Phases in canonical edge order, each in `[0, 2π)`.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn with_diagonal(&self, diagonal: Vec<f64>) -> Result<Self> {
        Self::new(self.graph.clone(), self.coupling, self.phases.clone(), diagonal)
    }

    pub fn with_phases(&self, phases: Vec<f64>) -> Result<Self> {
        Self::new(self.graph.clone(), self.coupling, phases, self.diagonal.clone())
    }

    /// `D H D†` with `D = diag(exp(iχ_j))`; only the phases change.
    pub fn apply_gauge(&self, chi: &GaugeVector) -> Result<Self> {
        if chi.len() != self.n() {
            return Err(WalkError::DimensionMismatch { expected: self.n(), got: chi.len() });
        }
        let x = chi.angles();
        let phases = self
            .graph
            .edges()
            .iter()
            .zip(&self.phases)
            .map(|(&(j, k), &phi)| phi + x[j - 1] - x[k - 1])
            .collect();
        self.with_phases(phases)
    }

    /// Gauge that zeroes every phase on the breadth-first spanning tree
    /// rooted at vertex 1. After applying it, only chord edges carry phases
    /// and each equals the holonomy of its fundamental cycle.
    pub fn tree_gauge(&self) -> Result<GaugeVector> {
        let (order, parents) = self.graph.bfs_tree();
        if parents.iter().any(Option::is_none) {
            return Err(WalkError::Disconnected);
        }
        let mut chi = vec![0.0; self.n()];
        for &child in order.iter().skip(1) {
            let parent = parents[child].expect("reached");
            let idx = self.graph.edge_index(parent + 1, child + 1).expect("tree edge exists");
            let phi = self.phases[idx];
            chi[child] = if parent < child { chi[parent] + phi } else { chi[parent] - phi };
        }
        Ok(GaugeVector::new(chi))
    }

    /// Holonomies of a fundamental cycle basis, one per chord, wrapped to
    /// `[0, 2π)`. Relative to the zero-phase Hamiltonian of the same coupling.
    pub fn cycle_holonomies(&self) -> Result<Vec<f64>> {
        let gauged = self.apply_gauge(&self.tree_gauge()?)?;
        let parents = self.graph.bfs_parents();
        Ok(self
            .graph
            .edges()
            .iter()
            .zip(gauged.phases())
            .filter(|&(&(j, k), _)| parents[k - 1] != Some(j - 1) && parents[j - 1] != Some(k - 1))
            .map(|(_, &phi)| phi)
            .collect())
    }

    /// True when every holonomy of a cycle basis is 1 within `tol`, i.e. the
    /// Hamiltonian is gauge-equivalent to its zero-phase (real) counterpart.
    pub fn is_gauge_real(&self, tol: f64) -> Result<bool> {
        Ok(self.cycle_holonomies()?.iter().all(|&h| angle_distance(h, 0.0) <= tol))
    }

    /// Condition-1 residual for the complete graph: with the constant
    /// diagonal removed (`M = H - dI`), returns `max_{r ≠ target} |[M²]_{r,target}|`,
    /// the largest overlap between the target column and any other row.
    pub fn condition1_residual(&self, target: usize) -> Result<f64> {
        let n = self.n();
        self.graph.check_vertex(target)?;
        if self.graph.edge_count() != n * (n - 1) / 2 {
            return Err(WalkError::NotComplete);
        }
        let d0 = self.diagonal[0];
        if self.diagonal.iter().any(|&d| (d - d0).abs() > 1e-12) {
            return Err(WalkError::InvalidArgument("condition-1 residual needs a constant diagonal".into()));
        }
        let t = target - 1;
        let mut m = self.matrix.clone();
        for j in 0..n {
            m[(j, j)] -= Complex64::new(d0, 0.0);
        }
        let col = m.column(t);
        Ok((0..n)
            .filter(|&r| r != t)
            .map(|r| m.row(r).iter().zip(col.iter()).map(|(a, b)| a * b).sum::<Complex64>().norm())
            .fold(0.0, f64::max))
    }
}

fn cycle_size_error(n: usize) -> WalkError {
    WalkError::InvalidArgument(format!("cycle needs n >= 3, got {n}"))
}

fn assemble(graph: &Graph, coupling: Coupling, phases: &[f64], diagonal: &[f64]) -> DMatrix<Complex64> {
    let n = graph.n();
    let s = coupling.sign();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (&(j, k), &phi) in graph.edges().iter().zip(phases) {
        let z = Complex64::from_polar(s, phi);
        m[(j - 1, k - 1)] = z;
        m[(k - 1, j - 1)] = z.conj();
    }
    for (j, &d) in diagonal.iter().enumerate() {
        m[(j, j)] = Complex64::new(d, 0.0);
    }
    m
}

/// `max |M_jk - conj(M_kj)|`.
pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for j in 0..n {
        for k in j..n {
            dev = dev.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    dev
}

/// Effective uniform ring phase `θ = (1/n) Σ φ_j` for per-link phases
/// `φ_j` on an `n`-cycle. The ring with those link phases and the ring with
/// `θ` on every link share all site-to-site transition probabilities.
pub fn reduce_cycle_phases(link_phases: &[f64]) -> Result<f64> {
    if link_phases.len() < 3 {
        return Err(cycle_size_error(link_phases.len()));
    }
    Ok(link_phases.iter().sum::<f64>() / link_phases.len() as f64)
}

/// Plain-text form:
///
/// ```text
/// n <N>
/// coupling <adjacency|laplacian>
/// diagonal <d_1> ... <d_N>
/// <j> <k> <phase>
/// ```
///
/// Phases are radians with 17 significant digits.
impl fmt::Display for PhasedHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n())?;
        writeln!(f, "coupling {}", self.coupling.name())?;
        write!(f, "diagonal")?;
        for d in &self.diagonal {
            write!(f, " {d:.16e}")?;
        }
        writeln!(f)?;
        for (&(j, k), phi) in self.graph.edges().iter().zip(&self.phases) {
            writeln!(f, "{j} {k} {phi:.16e}")?;
        }
        Ok(())
    }
}

impl FromStr for PhasedHamiltonian {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self> {
        let mut n = None;
        let mut coupling = None;
        let mut diagonal = None;
        let mut edges = Vec::new();
        let mut phase_list = Vec::new();
        for (idx, raw) in s.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| WalkError::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "n" if fields.len() == 2 => {
                    n = Some(fields[1].parse::<usize>().map_err(|e| err(e.to_string()))?);
                }
                "coupling" if fields.len() == 2 => coupling = Some(fields[1].parse::<Coupling>()?),
                "diagonal" => {
                    let values = fields[1..]
                        .iter()
                        .map(|v| v.parse::<f64>().map_err(|e| err(e.to_string())))
                        .collect::<Result<Vec<_>>>()?;
                    diagonal = Some(values);
                }
                _ if fields.len() == 3 => {
                    let j = fields[0].parse::<usize>().map_err(|e| err(e.to_string()))?;
                    let k = fields[1].parse::<usize>().map_err(|e| err(e.to_string()))?;
                    let phi = fields[2].parse::<f64>().map_err(|e| err(e.to_string()))?;
                    edges.push((j, k));
                    phase_list.push(((j.min(k), j.max(k)), if j < k { phi } else { -phi }));
                }
                _ => return Err(err(format!("unrecognised line `{line}`"))),
            }
        }
        let missing = |what: &str| WalkError::Parse { line: 0, message: format!("missing `{what}`") };
        let n = n.ok_or_else(|| missing("n"))?;
        let coupling = coupling.ok_or_else(|| missing("coupling"))?;
        let diagonal = diagonal.ok_or_else(|| missing("diagonal"))?;
        let graph = Graph::new(n, edges)?;
        let mut phases = vec![0.0; graph.edge_count()];
        for ((j, k), phi) in phase_list {
            phases[graph.edge_index(j, k).expect("edge was inserted")] = phi;
        }
        Self::new(graph, coupling, phases, diagonal)
    }
}
