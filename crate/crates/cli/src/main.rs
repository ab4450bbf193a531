//! `speck`: estimate the number of communities in a network.
//!
//! Exit codes: 0 success, 1 usage error (bad flags, malformed plan or spec
//! file), 2 runtime error (unreadable or degenerate graph, infeasible model,
//! solver failure).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

const DEFAULTS_NOTE: &str = "Estimator defaults: t=5, kmax=15.";

#[derive(Debug, Parser)]
#[command(name = "speck", version, about = "Estimate the number of communities in a network from non-backtracking and Bethe Hessian spectra", after_help = DEFAULTS_NOTE)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate K for one edge-list file.
    #[command(after_help = DEFAULTS_NOTE)]
    Estimate(EstimateArgs),
    /// Sample a graph from a (degree-corrected) block model.
    #[command(after_help = DEFAULTS_NOTE)]
    Generate(GenerateArgs),
    /// Run a replicated accuracy sweep described by a JSON plan.
    #[command(after_help = DEFAULTS_NOTE)]
    Bench(BenchArgs),
    /// Estimate K on a named real network or an edge-list path.
    #[command(name = "eval-real", after_help = DEFAULTS_NOTE)]
    EvalReal(EvalRealArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    All,
    Nb,
    Bhm,
    Bhmc,
    Bha,
    Bhac,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NbThresholdArg {
    Dtilde,
    OperatorNorm,
}

#[derive(Debug, Args)]
struct EstimatorArgs {
    /// Estimator(s) to run.
    #[arg(long, value_enum, default_value = "all")]
    method: MethodArg,
    /// Correction parameter of BHmc/BHac (t=5).
    #[arg(long, default_value_t = 5.0)]
    t: f64,
    /// Largest K the corrected methods can return (kmax=15).
    #[arg(long, default_value_t = 15)]
    kmax: usize,
    /// Bulk edge for NB: √d̃ or the square root of the spectral radius.
    #[arg(long, value_enum, default_value = "dtilde")]
    nb_threshold: NbThresholdArg,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Restrict to the largest connected component first.
    #[arg(long)]
    lcc: bool,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    /// Edge list: two node ids per line; `#` and `%` start comments.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    estimator: EstimatorArgs,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// JSON block-model spec (fields n, k, beta, lambda_n, and optionally
    /// pi, w, gamma, theta_low). Conflicts with the inline flags.
    #[arg(long, conflicts_with_all = ["n", "k", "beta", "lambda_n", "gamma", "theta_low", "w", "pi", "size_ratio"])]
    spec: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    /// Out-in probability ratio.
    #[arg(long, default_value_t = 0.2)]
    beta: f64,
    /// Target average expected degree.
    #[arg(long)]
    lambda_n: Option<f64>,
    /// Fraction of low-degree nodes (θ = theta_low); 0 gives the plain SBM.
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.2)]
    theta_low: f64,
    /// Within-community weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    w: Option<Vec<f64>>,
    /// Community proportions, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "size_ratio")]
    pi: Option<Vec<f64>>,
    /// Community-size ratio r: π₁ = r/K, π_K = (2 − r)/K, others 1/K.
    #[arg(long)]
    size_ratio: Option<f64>,
    #[arg(long)]
    seed: u64,
    /// Edge-list output (1-based node ids).
    #[arg(long)]
    out: PathBuf,
    /// Planted labels output (`node community`, both 1-based); defaults to
    /// the edge-list path with extension `.labels`.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// JSON experiment plan.
    #[arg(long)]
    plan: PathBuf,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: BenchFormat,
    /// Omit the generated-at line (CSV) / field and runtimes (JSON).
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct EvalRealArgs {
    /// Registered dataset name (karate, dolphins, football, polbooks,
    /// polblogs) or a path to an edge-list/GML file.
    #[arg(long)]
    dataset: String,
    #[command(flatten)]
    estimator: EstimatorArgs,
}

/// How a command failed, which decides the exit code.
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let default_level = if matches!(cli.command, Command::Bench(_)) { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default_level))
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Estimate(args) => commands::estimate(args),
        Command::Generate(args) => commands::generate(args),
        Command::Bench(args) => commands::bench(args),
        Command::EvalReal(args) => commands::eval_real(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let (Failure::Usage(e) | Failure::Runtime(e)) = &failure;
            eprintln!("error: {e:#}");
            ExitCode::from(failure.code())
        }
    }
}
