//! `probreach` command-line runner.
//!
//! Every stochastic command takes `--seed` and writes CSV files (and an SVG
//! view of the same data) into `--out`. Flags may also come from a
//! `key = value` file passed with `--config`; flags on the command line win.

mod commands;
mod config;
mod output;
mod systems;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use commands::{cmd_acc_oracle_grid, cmd_bound, cmd_gpc, cmd_mcs, cmd_trials};
pub use systems::DemoSystem;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(#[from] clap::Error),

    #[error("{0}")]
    Param(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    /// 0 for help/version output, 2 bad parameters, 3 I/O, 4 numerical.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(e) if !e.use_stderr() => 0,
            CliError::Usage(_) | CliError::Param(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<probreach::Error> for CliError {
    fn from(e: probreach::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Param(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "probreach",
    version,
    about = "Data-driven probabilistic reachable set estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the Monte Carlo sample bound for dimension n, accuracy ε and confidence δ.
    #[command(args_override_self = true)]
    Bound(BoundArgs),
    /// Monte Carlo interval hull of a forward reachable set.
    #[command(args_override_self = true)]
    Mcs(McsArgs),
    /// Gaussian-process classifier estimate of the ACC safe set.
    #[command(args_override_self = true)]
    Gpc(GpcArgs),
    /// Repeated hull + validation trials to check the coverage guarantee empirically.
    #[command(args_override_self = true)]
    Trials(TrialsArgs),
    /// Closed-form ACC safe set on a grid.
    #[command(name = "acc-oracle", args_override_self = true)]
    AccOracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory for CSV and SVG artifacts (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReachArgs {
    #[arg(long, value_enum, default_value = "rotation-demo")]
    pub system: DemoSystem,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// RK4 step.
    #[arg(long, default_value_t = probreach::dynamics::DEFAULT_STEP)]
    pub step: f64,
    /// Initial-box lower corner, comma separated (defaults per system).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lower: Option<Vec<f64>>,
    /// Initial-box upper corner, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub upper: Option<Vec<f64>>,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct McsArgs {
    #[command(flatten)]
    pub reach: ReachArgs,
    /// Override the sample count (the result is then uncertified if below the bound).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Coordinates shown in the SVG, as `i,j`.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub project: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Adaptive,
    Uniform,
    Lhs,
}

#[derive(Debug, Clone, Args)]
pub struct GpcArgs {
    #[arg(long, value_enum, default_value = "adaptive")]
    pub strategy: Strategy,
    /// Label budget.
    #[arg(long, default_value_t = 200)]
    pub m: usize,
    /// Candidate pool size for adaptive sampling.
    #[arg(long, default_value_t = 1000)]
    pub pool: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub acc: AccArgs,
    /// λ added to the Gram diagonal.
    #[arg(long, default_value_t = 1e-6)]
    pub regularization: f64,
    /// Evaluation grid resolution per axis.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long, default_value_t = probreach::dynamics::DEFAULT_STEP)]
    pub step: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AccArgs {
    /// Braking deceleration.
    #[arg(long, default_value_t = 4.9)]
    pub a: f64,
    /// Drag coefficient.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Follower's initial speed, held fixed.
    #[arg(long, default_value_t = 5.0)]
    pub vf: f64,
    /// Initial gap range `lo,hi`.
    #[arg(long, value_delimiter = ',', default_value = "0,2", allow_hyphen_values = true)]
    pub h_range: Vec<f64>,
    /// Leader speed range `lo,hi`.
    #[arg(long, value_delimiter = ',', default_value = "0,5")]
    pub vl_range: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct TrialsArgs {
    #[command(flatten)]
    pub reach: ReachArgs,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Fresh successor samples per trial used to estimate coverage.
    #[arg(long, default_value_t = 10_000)]
    pub validation: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub acc: AccArgs,
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `args` (including the program name), applies any `--config`
/// file, and runs the command. Summary lines go to `stdout`.
pub fn run<W: Write>(args: &[String], stdout: &mut W) -> CliResult<()> {
    let args = config::expand(args)?;
    let cli = Cli::try_parse_from(args)?;
    match cli.command {
        Command::Bound(a) => cmd_bound(&a, stdout),
        Command::Mcs(a) => cmd_mcs(&a, stdout),
        Command::Gpc(a) => cmd_gpc(&a, stdout),
        Command::Trials(a) => cmd_trials(&a, stdout),
        Command::AccOracle(a) => cmd_acc_oracle_grid(&a, stdout),
    }
}
