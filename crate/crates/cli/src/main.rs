//! Command-line surface for accordant clustering: fitting, feasibility
//! checks, baseline comparison, oracle validation, and synthetic data
//! generation.
//!
//! Exit codes are stable contracts: 0 ok, 1 internal error, 2 infeasible
//! constraint, 3 ingestion error, 4 enumeration budget exceeded, 64 usage
//! error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use accordant::Error;

#[derive(Parser)]
#[command(
    name = "accordant",
    version,
    about = "Group-constrained k-means clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a CSV dataset and write a JSON result.
    Fit(FitArgs),
    /// Print the feasible cluster-count range for a constraint.
    Feasible(FeasibleArgs),
    /// Compare algorithms over repeated seeded runs; emits a CSV table.
    Compare(CompareArgs),
    /// Check the heuristic against the exhaustive optimum on tiny inputs.
    Oracle(OracleArgs),
    /// Generate a synthetic Gaussian-mixture dataset with planted labels.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Akmeans,
    Kmeans,
}

#[derive(Clone, Copy, ValueEnum)]
enum Init {
    Uniform,
    DistinctGroups,
}

impl From<Init> for accordant::InitMode {
    fn from(v: Init) -> Self {
        match v {
            Init::Uniform => accordant::InitMode::UniformRandom,
            Init::DistinctGroups => accordant::InitMode::DistinctGroups,
        }
    }
}

/// Flags shared by every command that reads a dataset.
#[derive(Args)]
struct DataArgs {
    /// Input CSV file (UTF-8, header row, comma-delimited).
    #[arg(long)]
    data: PathBuf,
    /// Group column, by header name or zero-based index.
    #[arg(long = "group-col", default_value = "group")]
    group_col: String,
    /// z-score each feature after encoding.
    #[arg(long)]
    standardize: bool,
}

#[derive(Args)]
struct ConstraintArgs {
    /// Number of clusters.
    #[arg(long)]
    k: usize,
    /// Number of groups that must reach the accordance threshold.
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Accordance fraction in [0, 1]; 0 disables the constraint.
    #[arg(long, default_value_t = 0.0)]
    t: f64,
}

#[derive(Args)]
struct RunArgs {
    /// Maximum iterations per fit.
    #[arg(long, default_value_t = 300)]
    tau: usize,
    /// Convergence threshold on the objective decrease.
    #[arg(long, default_value_t = 1e-7)]
    delta: f64,
    /// Independent restarts; the lowest-SSE run wins.
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    /// PRNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Center initialization mode.
    #[arg(long, value_enum, default_value_t = Init::DistinctGroups)]
    init: Init,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    constraint: ConstraintArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Algorithm to run.
    #[arg(long, value_enum, default_value_t = Algo::Akmeans)]
    algo: Algo,
    /// Write the JSON result here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also compute silhouette and Davies-Bouldin (quadratic in n).
    #[arg(long)]
    metrics: bool,
}

#[derive(Args)]
struct FeasibleArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Number of groups that must reach the accordance threshold.
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Accordance fraction in [0, 1].
    #[arg(long)]
    t: f64,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    constraint: ConstraintArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Number of seeded runs per algorithm.
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Write the CSV table here as well as stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Input CSV file; omit for --batch mode.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Group column, by header name or zero-based index.
    #[arg(long = "group-col", default_value = "group")]
    group_col: String,
    /// z-score each feature after encoding.
    #[arg(long)]
    standardize: bool,
    #[command(flatten)]
    constraint: ConstraintArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Run this many random instances instead of reading a file.
    #[arg(long)]
    batch: Option<usize>,
    /// Points per random instance in batch mode.
    #[arg(long, default_value_t = 10)]
    points: usize,
    /// Groups per random instance in batch mode.
    #[arg(long, default_value_t = 2)]
    groups: usize,
    /// Feature dimensions in batch mode.
    #[arg(long, default_value_t = 2)]
    dim: usize,
}

#[derive(Args)]
struct SynthArgs {
    /// Component centers: semicolon-separated points with comma-separated
    /// coordinates, e.g. "0,0;10,0;20,0;30,0".
    #[arg(long)]
    centers: String,
    /// Isotropic standard deviation, one value or one per component.
    #[arg(long, default_value = "1.0")]
    stddev: String,
    /// Points per component, one value or one per component.
    #[arg(long, default_value = "100")]
    count: String,
    /// Group overlay: "component", "split:DIM" (cut each component at its
    /// own center coordinate), or "split:DIM:c0,c1,..." with `_` entries
    /// for components left whole.
    #[arg(long, default_value = "component")]
    overlay: String,
    /// PRNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Planted-label sidecar path (default: <out>.planted.csv).
    #[arg(long)]
    planted: Option<PathBuf>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Infeasible { .. } => 2,
        Error::Ingest(_) => 3,
        Error::BudgetExceeded { .. } => 4,
        Error::InvalidInput(_) => 64,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Fit(args) => commands::fit(args),
        Command::Feasible(args) => commands::feasible(args),
        Command::Compare(args) => commands::compare(args),
        Command::Oracle(args) => commands::oracle(args),
        Command::Synth(args) => commands::synth(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
