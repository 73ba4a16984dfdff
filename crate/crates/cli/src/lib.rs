//! Command-line front end for `neuc-mds`.
//!
//! | command    | input                 | output                          |
//! |------------|-----------------------|---------------------------------|
//! | `embed`    | dissimilarity matrix  | embedding file + JSON report    |
//! | `select`   | dissimilarity matrix  | JSON selection summary          |
//! | `generate` | none                  | dissimilarity matrix            |
//! | `perturb`  | point cloud           | dissimilarity matrix            |
//! | `sweep`    | dissimilarity matrix  | CSV, one row per `(k, method)`  |
//! | `rmt`      | none                  | CSV, one row per `(c, mode)`    |
//! | `landmark` | dissimilarity matrix  | embedding file + JSON report    |
//!
//! Exit codes: 0 success, 2 usage, 3 bad data, 4 numerical failure.

pub mod commands;
pub mod error;
pub mod format;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use neuc_mds::landmark::LandmarkStrategy;
use neuc_mds::rmt::{Distribution, Mode};
use neuc_mds::Method;

pub use error::{CliError, Result, EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
pub use format::MatrixFormat;

#[derive(Debug, Parser)]
#[command(name = "neuc-mds", version, about = "Non-Euclidean multidimensional scaling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Embed a dissimilarity matrix into k signed axes.
    Embed(EmbedArgs),
    /// Report the eigenvalue selection without building coordinates.
    Select(SelectArgs),
    /// Write a synthetic dissimilarity matrix.
    Generate(GenerateArgs),
    /// Build a perturbed dissimilarity matrix from a point cloud.
    Perturb(PerturbArgs),
    /// STRESS report for every (k, method) pair.
    Sweep(SweepArgs),
    /// Random-matrix theory versus sampled error.
    Rmt(RmtArgs),
    /// Embed through a landmark subset.
    Landmark(LandmarkArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Cmds,
    Neuc,
    NeucPlus,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Cmds => Method::Cmds,
            MethodArg::Neuc => Method::Neuc,
            MethodArg::NeucPlus => Method::Plus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    Simplex,
    Balls,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PerturbKind {
    Knn,
    Noise,
    Missing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Cmds,
    Neuc,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Cmds => Mode::Cmds,
            ModeArg::Neuc => Mode::Neuc,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Gaussian,
    Rademacher,
}

impl From<DistArg> for Distribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::Gaussian => Distribution::Gaussian,
            DistArg::Rademacher => Distribution::Rademacher,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Random,
    MaxMin,
}

impl From<StrategyArg> for LandmarkStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Random => LandmarkStrategy::Random,
            StrategyArg::MaxMin => LandmarkStrategy::MaxMin,
        }
    }
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Dissimilarity matrix, text or binary.
    #[arg(long)]
    pub input: PathBuf,
    /// Embedding file to write.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "neuc")]
    pub method: MethodArg,
    /// JSON report path; printed to stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the reconstructed matrix here.
    #[arg(long)]
    pub dhat: Option<PathBuf>,
    /// Format of the reconstructed matrix.
    #[arg(long, value_enum, default_value = "text")]
    pub format: MatrixFormat,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "neuc")]
    pub method: MethodArg,
    /// JSON output path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: GenerateKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: MatrixFormat,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[arg(long, value_enum)]
    pub kind: PerturbKind,
    /// Point cloud (`n d` header line, then one point per line). When
    /// absent, `--n` uniform points in `[0,1]^dim` are drawn from `--seed`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Neighbours per point for `knn`.
    #[arg(long)]
    pub k_nn: Option<usize>,
    /// Noise level for `noise`; derived from the data when absent.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Probability of keeping a coordinate for `missing`.
    #[arg(long)]
    pub keep_prob: Option<f64>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: MatrixFormat,
    /// Also write the unperturbed point cloud here.
    #[arg(long)]
    pub points_output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `a:b:step`, inclusive, or a single `k`.
    #[arg(long)]
    pub k_list: String,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["cmds", "neuc", "neuc-plus"])]
    pub method: Vec<MethodArg>,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RmtArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Comma-separated fractions `c = k/n` in `(0, 1]`.
    #[arg(long, value_delimiter = ',', default_values = ["0.05", "0.1", "0.15", "0.2", "0.25", "0.3", "0.35", "0.4", "0.45"])]
    pub c_list: Vec<f64>,
    /// Sampled matrices per row; 0 prints theory only.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["cmds", "neuc"])]
    pub mode: Vec<ModeArg>,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub dist: DistArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LandmarkArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Number of landmarks `m`, with `k < m <= n`.
    #[arg(long)]
    pub landmarks: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "neuc")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "random")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Runs one parsed command, returning whatever it prints to stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Embed(a) => commands::embed(a),
        Command::Select(a) => commands::select(a),
        Command::Generate(a) => commands::generate(a),
        Command::Perturb(a) => commands::perturb(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Rmt(a) => commands::rmt(a),
        Command::Landmark(a) => commands::landmark(a),
    }
}
