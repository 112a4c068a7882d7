use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "powerburr", version, about = "Fit PowerBurr claim-severity models and estimate reserves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit severity families to a claim file.
    Fit(FitArgs),
    /// Monte Carlo reserves from fitted or given models.
    Reserve(ReserveArgs),
    /// Simulation study: bias and RMSE tables.
    Study(StudyArgs),
    /// Binomial back-test of quantile exceedances.
    Backtest(BacktestArgs),
    /// Write synthetic claims from a given model.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileArg {
    Desk,
    Full,
}

/// Flags shared by every subcommand. A config file, when given, overrides
/// these; these override built-in defaults.
#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: $POWERBURR_THREADS, else all cores).
    #[arg(long, env = "POWERBURR_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileArg>,
    /// Simulated totals per reserve.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long = "epsilon")]
    pub epsilons: Vec<f64>,
    #[arg(long = "lambda")]
    pub lambdas: Vec<f64>,
    /// Family slug or label, e.g. `gamma`, `6par`, `L-N`.
    #[arg(long = "family")]
    pub families: Vec<String>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Report destination (a directory for `study`); stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in the report (makes reports non-reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Header name or zero-based index of the claim column.
    #[arg(long, default_value = "0")]
    pub column: String,
    #[arg(long, default_value = ",")]
    pub delimiter: String,
    #[arg(long)]
    pub deductible: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InputArgs,
    /// Custom start vector (comma-separated, the family's own layout);
    /// repeatable, requires exactly one --family.
    #[arg(long = "start")]
    pub starts: Vec<String>,
    /// Parametric bootstrap replicates for quantile intervals.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

#[derive(Debug, Args)]
pub struct ReserveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InputArgs,
    /// Model given directly as `kind:p1,p2,…`, e.g. `gamma:1,2`; repeatable.
    #[arg(long = "spec")]
    pub specs: Vec<String>,
    /// Also report reserves divided by this factor.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Parametric bootstrap replicates for reserve intervals.
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub common: Common,
    /// True family (default parameters); repeatable. Default: the six
    /// classical columns.
    #[arg(long = "true-family")]
    pub true_families: Vec<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub truth_m: Option<usize>,
    #[arg(long)]
    pub progress: bool,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: InputArgs,
    /// Explicit thresholds, one per --epsilon, in the same order.
    #[arg(long = "threshold")]
    pub thresholds: Vec<f64>,
    /// Test a bare count instead of a claim file: number of observations…
    #[arg(long, requires = "exceedances")]
    pub count_n: Option<usize>,
    /// …and observed exceedances (one per --epsilon).
    #[arg(long = "exceedances")]
    pub exceedances: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    /// `kind:p1,p2,…`
    #[arg(long)]
    pub spec: String,
    #[arg(long)]
    pub n: usize,
}
