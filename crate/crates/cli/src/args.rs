use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "kdsos", version, about = "Community detection in time-ordered network snapshots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a dynamic SBM scenario and write its snapshots and true memberships.
    Simulate(SimulateArgs),
    /// Cluster every snapshot of a series.
    Fit(FitArgs),
    /// Score a bandwidth grid without fitting.
    Tune(TuneArgs),
    /// Check the bias-variance decomposition of the aggregate on a simulated scenario.
    Audit(AuditArgs),
    /// Run a preset simulation suite.
    Experiment(ExperimentArgs),
    /// Tabulate community transitions of a membership table.
    Summarize(SummarizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Box,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration with optional `scenario`, `estimator` and `experiment` blocks.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Default)]
pub struct ScenarioFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "T")]
    pub time_points: Option<usize>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct EstimatorFlags {
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub kernel: Option<KernelArg>,
    /// Bandwidth in [0, 1].
    #[arg(long)]
    pub r: Option<f64>,
    /// Pick the bandwidth with the split-window tuner.
    #[arg(long)]
    pub tune: bool,
    /// Comma-separated tuning bandwidths.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Tuner window scaling.
    #[arg(long)]
    pub adjust: Option<f64>,
    /// Exclude the center snapshot from both tuner half-windows.
    #[arg(long)]
    pub strict_half_windows: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scenario: ScenarioFlags,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Snapshot edge-list file.
    #[arg(long)]
    pub series: PathBuf,
    /// True memberships; adds per-time Hamming errors to the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorFlags,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub series: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorFlags,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    /// Bandwidth of the box window.
    #[arg(long, default_value_t = 0.1)]
    pub r: f64,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: Common,
    /// figure3, figure4_gamma, figure4_rho, alignability or audit.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "T")]
    pub time_points: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub adjust: Option<f64>,
    /// Largest bandwidth of the figure-3 curves, in grid steps.
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Sweep values (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    /// Record wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
    /// Run trials on one thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// Membership table (t_index,node,community).
    #[arg(long)]
    pub memberships: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    /// Distance between compared time points.
    #[arg(long, default_value_t = 1)]
    pub lag: usize,
}
