//! `cica` command-line front end: reads models, runs the analyses in
//! `cica-core`, and writes JSON reports and plot-ready CSV.
//!
//! Exit codes: 0 success, 2 I/O or parse error, 3 invalid model or option,
//! 4 perfectly correlated components, 5 solver failure.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod input;
pub mod report;

pub use commands::run;
pub use report::Units;

#[derive(Debug, Parser)]
#[command(
    name = "cica",
    version,
    about = "Common information components analysis"
)]
pub struct Cli {
    /// Worker threads for the discrete solver (0: all available cores).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Leave run metadata (timestamp, argv, threads) out of reports.
    #[arg(long, global = true)]
    pub no_meta: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical correlation analysis.
    Cca(CcaArgs),
    /// Relaxed common information and projections of a Gaussian model.
    Gaussian(GaussianArgs),
    /// Relaxed common information of a discrete pmf (upper bound).
    Discrete(DiscreteArgs),
    /// The binary example on which CCA finds nothing.
    Toy(ToyArgs),
}

#[derive(Debug, Args)]
pub struct ModelSource {
    /// CSV of X observations (header row, one observation per row).
    #[arg(long, requires = "y")]
    pub x: Option<PathBuf>,
    /// CSV of Y observations, row-aligned with --x.
    #[arg(long, requires = "x")]
    pub y: Option<PathBuf>,
    /// Covariance JSON {"k_x": [[..]], "k_y": [[..]], "k_xy": [[..]]}.
    #[arg(long, conflicts_with_all = ["x", "y"])]
    pub cov: Option<PathBuf>,
    /// Diagonal ridge for estimated covariances (default: 1e-8 · mean variance).
    #[arg(long)]
    pub ridge: Option<f64>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["x", "cov"])))]
pub struct CcaArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Number of components.
    #[arg(short = 'k')]
    pub k: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VersionArg {
    Map,
    CondExp,
    Marginal,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["x", "cov"])))]
pub struct GaussianArgs {
    #[command(flatten)]
    pub source: ModelSource,
    /// Residual dependence budget, in --units.
    #[arg(long)]
    pub gamma: f64,
    /// Projection rule.
    #[arg(long, value_enum, default_value_t = VersionArg::CondExp)]
    pub version: VersionArg,
    #[arg(long, value_enum, default_value_t = Units::Nats)]
    pub units: Units,
    /// Also write the C_γ curve (gamma,c_gamma,k) to this CSV.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Evenly spaced budgets from 0 to the total information.
    #[arg(long, default_value_t = 101)]
    pub curve_points: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    /// CSV with symbol-index columns followed by the probability.
    #[arg(long)]
    pub pmf: PathBuf,
    /// Residual dependence budget, in --units.
    #[arg(long)]
    pub gamma: f64,
    /// Latent alphabet size (default: cells + 1).
    #[arg(long)]
    pub card_w: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Treat every index column as a source and constrain the conditional
    /// total correlation.
    #[arg(long)]
    pub multi: bool,
    #[arg(long, value_enum, default_value_t = Units::Nats)]
    pub units: Units,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ToyArgs {
    /// Crossover probability of the dependent bit pair.
    #[arg(long)]
    pub a0: f64,
    /// Budget for the CICA solve, in --units.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, value_enum, default_value_t = Units::Nats)]
    pub units: Units,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] cica_core::Error),
    /// Solver failure with a JSON telemetry dump.
    #[error("{error}")]
    Solver {
        error: cica_core::Error,
        telemetry: String,
    },
}

impl CliError {
    pub(crate) fn io(path: &Path, e: impl Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub(crate) fn parse(path: &Path, e: impl Display) -> Self {
        CliError::Parse(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> i32 {
        use cica_core::Error as E;
        match self {
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Core(E::PerfectCorrelation { .. }) => 4,
            CliError::Core(E::NoConvergence { .. } | E::Infeasible { .. })
            | CliError::Solver { .. } => 5,
            CliError::Core(_) => 3,
        }
    }

    pub fn telemetry(&self) -> Option<&str> {
        match self {
            CliError::Solver { telemetry, .. } => Some(telemetry),
            _ => None,
        }
    }
}
