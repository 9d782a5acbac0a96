use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpimpute::Strategy;

#[derive(Debug, Parser)]
#[command(name = "dpimpute", version, about = "Differentially private analysis with missing responses")]
pub struct Cli {
    /// Worker threads for simulations (0 = one per core).
    #[arg(long, global = true, env = "DPIMPUTE_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the Monte Carlo comparison described by a JSON config and write
    /// runs.csv, summary.csv and optionally boxplot.svg.
    Simulate(SimulateArgs),
    /// Print the sensitivity and group-privacy bounds for a mean query as JSON.
    Bounds(BoundsArgs),
    /// Fill missing responses with a regression model and write the completed CSV.
    Impute(ImputeArgs),
    /// Release a private mean of the response with one strategy; prints JSON.
    Query(QueryArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// JSON config. Unknown keys are rejected.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `output_dir` from the config.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(long)]
    pub n_mis: usize,
    /// Lower response bound.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lo: f64,
    /// Upper response bound.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub hi: f64,
    /// Dataset size.
    #[arg(long)]
    pub n: usize,
}

/// Options shared by the subcommands that read a dataset.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV with header `x1,...,xd,y,missing`; covariates in [0, 1].
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fit the regression with a constant term.
    #[arg(long)]
    pub intercept: bool,
}

#[derive(Debug, Args)]
pub struct ImputeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Completed CSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Use a fitted model (JSON with `beta`, `private`, `epsilon_spent`) instead of fitting.
    #[arg(long, conflicts_with = "epsilon")]
    pub model: Option<PathBuf>,
    /// Fit the model privately with this budget. Without it the fit is not private.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Add N(0, σ̂²) noise to each imputed value (non-private fits only).
    #[arg(long)]
    pub stochastic: bool,
    /// Write the fitted model as JSON.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    AvailableCase,
    Impute,
    DpImpute,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::AvailableCase => Strategy::AvailableCase,
            StrategyArg::Impute => Strategy::ImputeThenQuery,
            StrategyArg::DpImpute => Strategy::DpImputeThenQuery,
        }
    }
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub strategy: StrategyArg,
    /// Total privacy budget.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Share of the budget spent on the private imputation model (dp-impute only).
    #[arg(long, default_value_t = 0.5)]
    pub split: f64,
}
