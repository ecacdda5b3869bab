//! Command-line driver for the chiral-walk experiments.
//!
//! Every subcommand writes one CSV table: `#` metadata lines, a header row,
//! then one row per sample with 15 significant digits. Output goes to
//! `--output`, else to `<out-dir>/<command>.csv` when an output directory
//! is configured (flag or `CHIRAL_WALK_OUT_DIR`), else to stdout.

mod config;
mod experiments;
mod output;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chiral_walk::WalkError;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Walk(
                WalkError::InvalidArgument(_)
                | WalkError::InvalidGrid(_)
                | WalkError::InvalidGraph(_)
                | WalkError::VertexOutOfRange { .. }
                | WalkError::Parse { .. }
                | WalkError::NegativeTime(_),
            ) => 2,
            _ => 1,
        }
    }
}

/// Exit status when the optimizer stops on its evaluation budget.
const BUDGET_EXHAUSTED: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "chiral-walk", version, about = "Chiral quantum walk experiments with CSV output", args_override_self = true)]
struct Cli {
    /// `key = value` file; its entries override command-line flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output CSV path.
    #[arg(short, long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    /// Directory for `<command>.csv` when no output path is given.
    #[arg(long, global = true, env = "CHIRAL_WALK_OUT_DIR", value_name = "DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transport and distance gain on a ring with a uniform link phase.
    Cycle(CycleArgs),
    /// Coherence, IPR and distance on the complete graph.
    Complete(CompleteArgs),
    /// Flat-state, Grover, orthogonality and speed-limit times against n.
    SearchScaling(SearchScalingArgs),
    /// Routing on the 12-site switch as the loop phase varies.
    Switch(SwitchArgs),
    /// Antipodal transport and suppression on the cube.
    Cube(CubeArgs),
    /// Optimize the distance over edge phases.
    Optimize(OptimizeArgs),
    /// Averages over random-phase ensembles.
    Ensemble(EnsembleArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Cycle(_) => "cycle",
            Command::Complete(_) => "complete",
            Command::SearchScaling(_) => "search-scaling",
            Command::Switch(_) => "switch",
            Command::Cube(_) => "cube",
            Command::Optimize(_) => "optimize",
            Command::Ensemble(_) => "ensemble",
        }
    }
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Last sample time.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Grid spacing.
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
}

#[derive(Args, Debug)]
pub struct CycleArgs {
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Comma-separated link phases; accepts forms like `0.13`, `pi/8`, `3pi/14`.
    #[arg(long, default_value = "0")]
    pub thetas: String,
    /// Comma-separated target vertices (default: every vertex but 1).
    #[arg(long)]
    pub targets: Option<String>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct CompleteArgs {
    #[arg(long, default_value_t = 13)]
    pub n: usize,
    /// `laplacian`, `appendix`, `grover` or `ensemble:<single|two|independent>`.
    #[arg(long, default_value = "laplacian")]
    pub mode: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ensemble size for `ensemble:` modes.
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct SearchScalingArgs {
    #[arg(long, default_value_t = 3)]
    pub n_min: usize,
    #[arg(long, default_value_t = 100)]
    pub n_max: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CouplingArg {
    Adjacency,
    Laplacian,
}

#[derive(Args, Debug)]
pub struct SwitchArgs {
    #[arg(long, value_enum, default_value_t = CouplingArg::Adjacency)]
    pub mode: CouplingArg,
    /// Comma-separated loop phases in `[0, pi/2]`.
    #[arg(long, default_value = "0,pi/8,pi/4,3pi/8,pi/2")]
    pub phis: String,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CubeTable {
    /// Probabilities and distance against time.
    Series,
    /// Largest probability reached at each vertex.
    Maxima,
}

#[derive(Args, Debug)]
pub struct CubeArgs {
    /// Twelve comma-separated edge phases in canonical edge order.
    #[arg(long, conflicts_with = "suppress")]
    pub phases: Option<String>,
    /// Use phases that minimize the distance at `--t-star`.
    #[arg(long)]
    pub suppress: bool,
    #[arg(long, default_value_t = 0.5)]
    pub t_star: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = CubeTable::Series)]
    pub table: CubeTable,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    /// `complete:N`, `cycle:N`, `star:N`, `hypercube:D`, `cube`, `switch` or `file:PATH`.
    #[arg(long, default_value = "complete:6")]
    pub graph: String,
    /// `max` or `min`.
    #[arg(long, default_value = "max")]
    pub sense: String,
    #[arg(long, default_value_t = 0.3)]
    pub t_star: f64,
    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 200_000)]
    pub budget: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub start: usize,
    /// Skip the tight final sweeps on the best restart.
    #[arg(long)]
    pub no_polish: bool,
    /// Also write the optimization result to this file.
    #[arg(long, value_name = "FILE")]
    pub result: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct EnsembleArgs {
    #[arg(long, default_value = "complete:13")]
    pub graph: String,
    /// `single`, `two` or `independent`.
    #[arg(long, default_value = "independent")]
    pub rule: String,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn parse_cli() -> Result<Cli, clap::Error> {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::try_parse_from(&args)?;
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    match config::config_args(&path) {
        Ok(extra) => Cli::try_parse_from(args.into_iter().chain(extra)),
        Err(e) => Err(Cli::command_error(e.to_string())),
    }
}

impl Cli {
    fn command_error(message: String) -> clap::Error {
        use clap::CommandFactory;
        Cli::command().error(clap::error::ErrorKind::InvalidValue, message)
    }
}

fn main() -> ExitCode {
    let cli = match parse_cli() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let outcome = match &cli.command {
        Command::Cycle(a) => experiments::cycle(a)?,
        Command::Complete(a) => experiments::complete(a)?,
        Command::SearchScaling(a) => experiments::search_scaling(a)?,
        Command::Switch(a) => experiments::switch(a)?,
        Command::Cube(a) => experiments::cube(a)?,
        Command::Optimize(a) => experiments::optimize(a)?,
        Command::Ensemble(a) => experiments::ensemble(a)?,
    };

    let path = cli
        .output
        .clone()
        .or_else(|| cli.out_dir.as_ref().map(|d| d.join(format!("{}.csv", cli.command.name()))));
    let mut buf = Vec::new();
    outcome.table.write_to(&mut buf).map_err(|e| CliError::Io("<buffer>".into(), e))?;
    match &path {
        Some(p) => write_file(p, &buf)?,
        None => std::io::stdout().write_all(&buf).map_err(|e| CliError::Io("stdout".into(), e))?,
    }

    if let Some(result) = &outcome.result {
        let target = match &cli.command {
            Command::Optimize(a) => a.result.clone(),
            _ => None,
        }
        .or_else(|| cli.out_dir.as_ref().map(|d| d.join("optimize.result")));
        if let Some(p) = target {
            write_file(&p, result.as_bytes())?;
        }
    }

    if outcome.budget_exhausted {
        eprintln!("warning: optimizer budget exhausted; best-so-far written");
        return Ok(ExitCode::from(BUDGET_EXHAUSTED));
    }
    Ok(ExitCode::SUCCESS)
}

fn write_file(path: &PathBuf, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Io(path.display().to_string(), e))
}
