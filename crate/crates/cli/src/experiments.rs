use std::f64::consts::{FRAC_PI_2, PI, TAU};

use chiral_walk::closed_forms::{appendix_even, appendix_odd, grover_hamiltonian, search_times};
use chiral_walk::metrics::{delta_dqc, StartChoice, StartSeries, WalkPair};
use chiral_walk::optimizer::{
    optimize_phases, random_ensemble, EnsembleRule, EnsembleSpec, OptimizerConfig, Sense, Status,
};
use chiral_walk::{AmplitudeVector, Coupling, Graph, PhasedHamiltonian, SpectralDecomposition, TimeGrid};

use crate::output::{num, Table};
use crate::{
    CliError, CompleteArgs, CouplingArg, CubeArgs, CubeTable, CycleArgs, EnsembleArgs, GridArgs, OptimizeArgs,
    SearchScalingArgs, SwitchArgs,
};

pub struct Outcome {
    pub table: Table,
    /// Optimization result text, for commands that produce one.
    pub result: Option<String>,
    pub budget_exhausted: bool,
}

impl Outcome {
    fn table(table: Table) -> Self {
        Self { table, result: None, budget_exhausted: false }
    }
}

type Result<T> = std::result::Result<T, CliError>;

impl GridArgs {
    fn build(&self, default_t_max: f64) -> Result<TimeGrid> {
        Ok(TimeGrid::uniform(self.t_max.unwrap_or(default_t_max), self.step)?)
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

/// Parses `1.5`, `pi`, `-pi/4`, `3pi/8` or `3*pi/8`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || usage(format!("cannot parse angle '{s}'"));
    let Some((coef, rest)) = s.split_once("pi") else {
        return s.parse().map_err(|_| bad());
    };
    let coef = match coef.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match rest {
        "" => 1.0,
        r => r.strip_prefix('/').ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?,
    };
    let value = coef * PI / den;
    if !value.is_finite() {
        return Err(bad());
    }
    Ok(value)
}

/// Comma-separated angles, keeping the original spelling for column labels.
fn parse_angles(list: &str) -> Result<Vec<(String, f64)>> {
    let out: Vec<_> = list
        .split(',')
        .map(|tok| Ok((tok.trim().to_string(), parse_angle(tok)?)))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        return Err(usage("empty angle list"));
    }
    Ok(out)
}

fn parse_graph(spec: &str) -> Result<Graph> {
    let bad = || usage(format!("unknown graph '{spec}'"));
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let size = || arg.parse::<usize>().map_err(|_| bad());
    Ok(match kind {
        "complete" => Graph::complete(size()?)?,
        "cycle" => Graph::cycle(size()?)?,
        "star" => Graph::star(size()?)?,
        "hypercube" => Graph::hypercube(u32::try_from(size()?).map_err(|_| bad())?)?,
        "cube" => Graph::hypercube(3)?,
        "switch" => Graph::switch(),
        "file" => {
            let text = std::fs::read_to_string(arg).map_err(|e| CliError::Io(arg.to_string(), e))?;
            text.parse()?
        }
        _ => return Err(bad()),
    })
}

pub fn cycle(a: &CycleArgs) -> Result<Outcome> {
    let grid = a.grid.build(30.0)?;
    let g = Graph::cycle(a.n)?;
    let thetas = parse_angles(&a.thetas)?;
    for (label, theta) in &thetas {
        if !(0.0..=TAU).contains(theta) {
            return Err(usage(format!("theta '{label}' outside [0, 2pi]")));
        }
    }
    let targets: Vec<usize> = match &a.targets {
        Some(list) => list
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("bad target '{t}'"))))
            .collect::<Result<_>>()?,
        None => (2..=a.n).collect(),
    };
    for &k in &targets {
        g.check_vertex(k)?;
    }

    let mut header = vec!["t".to_string()];
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let l = g.laplacian();
    let h0 = PhasedHamiltonian::cycle(a.n, 0.0, 0.0)?;
    let mut deltas = Vec::new();
    for (label, theta) in &thetas {
        let h = PhasedHamiltonian::cycle(a.n, *theta, 0.0)?;
        let sd = SpectralDecomposition::of(&h);
        let probs: Vec<Vec<f64>> = grid.points().iter().map(|&t| sd.column(0, t).probabilities()).collect();
        for &k in &targets {
            header.push(format!("P1to{k}[theta={label}]"));
            columns.push(probs.iter().map(|p| p[k - 1]).collect());
        }
        deltas.push((format!("dDQC[theta={label}]"), delta_dqc(&h, &h0, &l, &grid, StartChoice::Vertex(1))?));
    }
    for (name, d) in deltas {
        header.push(name);
        columns.push(d);
    }
    let mut table = Table::new(header);
    table.comment(format!("chiral-walk cycle: ring with uniform link phase, start 1; {a:?}"));
    fill(&mut table, &grid, &columns);
    Ok(Outcome::table(table))
}

fn fill(table: &mut Table, grid: &TimeGrid, columns: &[Vec<f64>]) {
    for (i, &t) in grid.points().iter().enumerate() {
        let mut row = vec![t];
        row.extend(columns.iter().map(|c| c[i]));
        table.push_numbers(&row);
    }
}

enum CompleteMode {
    Laplacian,
    Appendix,
    Grover,
    Ensemble(EnsembleRule),
}

fn parse_mode(s: &str) -> Result<CompleteMode> {
    Ok(match s {
        "laplacian" => CompleteMode::Laplacian,
        "appendix" => CompleteMode::Appendix,
        "grover" => CompleteMode::Grover,
        _ => match s.strip_prefix("ensemble:") {
            Some(rule) => CompleteMode::Ensemble(rule.parse().map_err(|e: chiral_walk::WalkError| usage(e.to_string()))?),
            None => return Err(usage(format!("unknown mode '{s}'"))),
        },
    })
}

pub fn complete(a: &CompleteArgs) -> Result<Outcome> {
    let grid = a.grid.build(1.0)?;
    let mode = parse_mode(&a.mode)?;
    let g = Graph::complete(a.n)?;
    let h = match mode {
        CompleteMode::Ensemble(rule) => {
            let spec = EnsembleSpec::new(rule, a.samples, a.seed)?;
            let mut table = ensemble_table(&g, &spec, &grid)?;
            table.comment(format!("chiral-walk complete; {a:?}"));
            return Ok(Outcome::table(table));
        }
        CompleteMode::Laplacian => PhasedHamiltonian::from_laplacian(&g),
        CompleteMode::Appendix if a.n >= 4 && a.n % 2 == 0 => appendix_even(a.n)?,
        CompleteMode::Appendix if a.n >= 5 => appendix_odd(a.n)?,
        CompleteMode::Appendix => return Err(usage("appendix mode needs n >= 4")),
        CompleteMode::Grover => grover_hamiltonian(a.n)?,
    };
    let l = g.laplacian();
    let pair = WalkPair::with_laplacian(&h, &l)?;
    let series = StartSeries::compute(&pair, 1, &grid)?;
    let baseline = StartSeries::compute(&WalkPair::new(&PhasedHamiltonian::from_laplacian(&g))?, 1, &grid)?;
    let flat = AmplitudeVector::flat(a.n).to_dvector();
    let from_flat: Vec<f64> = grid.points().iter().map(|&t| pair.quantum().evolve(&flat, t)[0].norm_sqr()).collect();
    let delta: Vec<f64> = series.dqc.iter().zip(&baseline.dqc).map(|(x, y)| x - y).collect();

    let mut table = Table::new(["t", "C", "I", "DQC", "dDQC", "P1_from_flat"].map(String::from).to_vec());
    table.comment(format!("chiral-walk complete: start 1, dDQC relative to the Laplacian walk; {a:?}"));
    fill(&mut table, &grid, &[series.coherence, series.ipr, series.dqc, delta, from_flat]);
    Ok(Outcome::table(table))
}

fn ensemble_table(g: &Graph, spec: &EnsembleSpec, grid: &TimeGrid) -> Result<Table> {
    let avg = random_ensemble(g, spec, grid)?;
    let mut table =
        Table::new(["t", "C", "C_se", "I", "I_se", "DQC", "DQC_se", "dDQC"].map(String::from).to_vec());
    table.comment(format!(
        "ensemble rule={} samples={} seed={}; Laplacian coupling, start 1, dDQC relative to zero phases",
        spec.rule.name(),
        spec.samples,
        spec.seed
    ));
    fill(
        &mut table,
        grid,
        &[
            avg.coherence.mean,
            avg.coherence.std_err,
            avg.ipr.mean,
            avg.ipr.std_err,
            avg.dqc.mean,
            avg.dqc.std_err,
            avg.delta_dqc,
        ],
    );
    Ok(table)
}

pub fn search_scaling(a: &SearchScalingArgs) -> Result<Outcome> {
    if a.n_min < 3 || a.n_min > a.n_max {
        return Err(usage("need 3 <= n-min <= n-max"));
    }
    let mut table = Table::new(["n", "t_f", "t_g", "t_h", "tau_qsl"].map(String::from).to_vec());
    table.comment(format!("chiral-walk search-scaling; {a:?}"));
    for n in a.n_min..=a.n_max {
        let s = search_times(n)?;
        table.push(vec![n.to_string(), num(s.t_f), num(s.t_g), num(s.t_h), num(s.tau_qsl)]);
    }
    Ok(Outcome::table(table))
}

pub fn switch(a: &SwitchArgs) -> Result<Outcome> {
    let grid = a.grid.build(6.0)?;
    let coupling = match a.mode {
        CouplingArg::Adjacency => Coupling::Adjacency,
        CouplingArg::Laplacian => Coupling::Laplacian,
    };
    let phis = parse_angles(&a.phis)?;
    for (label, phi) in &phis {
        if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(phi) {
            return Err(usage(format!("phi '{label}' outside [0, pi/2]")));
        }
    }
    let l = Graph::switch().laplacian();
    let h0 = PhasedHamiltonian::switch(coupling, 0.0);
    let mut header = vec!["t".to_string()];
    let mut columns = Vec::new();
    for (label, phi) in &phis {
        let h = PhasedHamiltonian::switch(coupling, *phi);
        let sd = SpectralDecomposition::of(&h);
        let probs: Vec<Vec<f64>> = grid.points().iter().map(|&t| sd.column(0, t).probabilities()).collect();
        header.push(format!("P1to11[phi={label}]"));
        columns.push(probs.iter().map(|p| p[10]).collect());
        header.push(format!("P1to12[phi={label}]"));
        columns.push(probs.iter().map(|p| p[11]).collect());
        header.push(format!("dDQC[phi={label}]"));
        columns.push(delta_dqc(&h, &h0, &l, &grid, StartChoice::Vertex(1))?);
    }
    let mut table = Table::new(header);
    table.comment(format!("chiral-walk switch: phase on link 5->6, start 1; {a:?}"));
    fill(&mut table, &grid, &columns);
    Ok(Outcome::table(table))
}

pub fn cube(a: &CubeArgs) -> Result<Outcome> {
    let grid = a.grid.build(20.0)?;
    let g = Graph::hypercube(3)?;
    let phases = match (&a.phases, a.suppress) {
        (Some(list), _) => parse_angles(list)?.into_iter().map(|(_, x)| x).collect(),
        (None, true) => {
            let config = OptimizerConfig { t_star: a.t_star, sense: Sense::Minimize, seed: a.seed, ..Default::default() };
            optimize_phases(&g, 1, &config)?.best.angles().to_vec()
        }
        (None, false) => vec![0.0; g.edge_count()],
    };
    if phases.len() != g.edge_count() {
        return Err(usage(format!("cube needs {} phases, got {}", g.edge_count(), phases.len())));
    }
    let h = PhasedHamiltonian::with_coupling(&g, Coupling::Adjacency, phases.clone())?;
    let pair = WalkPair::new(&h)?;
    let series = StartSeries::compute(&pair, 1, &grid)?;
    let phase_note =
        format!("phases {}", phases.iter().map(|&x| num(x.rem_euclid(TAU))).collect::<Vec<_>>().join(" "));

    let table = match a.table {
        CubeTable::Series => {
            let mut header = vec!["t".to_string()];
            header.extend((1..=8).map(|k| format!("P1to{k}")));
            header.push("DQC".into());
            let mut table = Table::new(header);
            for (i, &t) in grid.points().iter().enumerate() {
                let mut row = vec![t];
                row.extend(&series.site_probs[i]);
                row.push(series.dqc[i]);
                table.push_numbers(&row);
            }
            table.comment(format!("chiral-walk cube: adjacency coupling, start 1; {a:?}"));
            table.comment(phase_note);
            table
        }
        CubeTable::Maxima => {
            let mut table = Table::new(["vertex", "adjacent_to_1", "max_probability"].map(String::from).to_vec());
            table.comment(format!("chiral-walk cube: largest probability over the grid, start 1; {a:?}"));
            table.comment(phase_note);
            for k in 1..=8 {
                let max = series.site_probs.iter().map(|p| p[k - 1]).fold(0.0, f64::max);
                table.push(vec![k.to_string(), u8::from(g.has_edge(1, k)).to_string(), num(max)]);
            }
            table
        }
    };
    Ok(Outcome::table(table))
}

pub fn optimize(a: &OptimizeArgs) -> Result<Outcome> {
    let grid = a.grid.build(1.0)?;
    let g = parse_graph(&a.graph)?;
    let sense: Sense = a.sense.parse().map_err(|e: chiral_walk::WalkError| usage(e.to_string()))?;
    let config = OptimizerConfig {
        budget: a.budget,
        restarts: a.restarts,
        seed: a.seed,
        t_star: a.t_star,
        sense,
        polish_tol: if a.no_polish { None } else { OptimizerConfig::default().polish_tol },
        ..Default::default()
    };
    let result = optimize_phases(&g, a.start, &config)?;
    let h = PhasedHamiltonian::with_coupling(&g, Coupling::Adjacency, result.best.angles().to_vec())?;
    let series = StartSeries::compute(&WalkPair::new(&h)?, a.start, &grid)?;

    let mut text = format!("graph {}\nsense {}\nt_star {}\nseed {}\n", a.graph, a.sense, a.t_star, a.seed);
    text.push_str(&result.to_string());
    let mut table = Table::new(["t", "DQC", "C", "I"].map(String::from).to_vec());
    table.comment(format!("chiral-walk optimize: metric series of the optimum; {a:?}"));
    for line in text.lines() {
        table.comment(line);
    }
    fill(&mut table, &grid, &[series.dqc, series.coherence, series.ipr]);
    Ok(Outcome { table, result: Some(text), budget_exhausted: result.status == Status::BudgetExhausted })
}

pub fn ensemble(a: &EnsembleArgs) -> Result<Outcome> {
    let grid = a.grid.build(1.0)?;
    let g = parse_graph(&a.graph)?;
    let rule: EnsembleRule = a.rule.parse().map_err(|e: chiral_walk::WalkError| usage(e.to_string()))?;
    let spec = EnsembleSpec::new(rule, a.samples, a.seed)?;
    let mut table = ensemble_table(&g, &spec, &grid)?;
    table.comment(format!("chiral-walk ensemble; {a:?}"));
    Ok(Outcome::table(table))
}
