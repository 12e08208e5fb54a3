//! `wnn`: generate datasets, condense them, solve exactly, compress,
//! benchmark weighted search and run evaluation sweeps.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 invalid data, 4 node budget
//! exhausted, 5 internal assertion failed.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wnn_core::data::{Family, Method};
use wnn_core::exact::DEFAULT_NODE_BUDGET;
use wnn_core::Metric;

#[derive(Debug, Parser)]
#[command(name = "wnn", version, about = "Weighted nearest-neighbor condensing toolkit")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV.
    Gen(GenArgs),
    /// Condense a dataset and write the kept points with their weights.
    Condense(CondenseArgs),
    /// Solve minimum condensing exactly, optionally exporting the 0-1 program.
    Exact(ExactArgs),
    /// Repeated train/test evaluation of several condensing methods.
    Eval(EvalArgs),
    /// Compare navigating-net queries against brute force.
    Searchbench(SearchArgs),
    /// Encode a dataset's greedy condensed set as a compression code.
    Compress(CompressArgs),
    /// Rebuild a weighted condensed set from a compression code.
    Reconstruct(ReconstructArgs),
    /// Evaluate the compression generalization bound.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Dataset CSV with a header row.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    /// Sample size (circle, blobs, sine).
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Size parameter (two-lines, bc-friendly).
    #[arg(long, default_value_t = 4)]
    gamma: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    classes: u32,
    #[arg(long, default_value_t = 2.0)]
    spread: f64,
    #[arg(long, default_value_t = 1.0)]
    noise: f64,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CondenseArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value = "greedy-wnn")]
    method: Method,
    #[arg(long, short)]
    output: PathBuf,
    /// Seed for Hart's scan order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Rule {
    /// Plain nearest neighbor (0-1 program).
    Nn,
    /// Nearest-enemy weighted (set cover).
    Wnn,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "nn")]
    rule: Rule,
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    /// Also write the 0-1 program in LP format (plain rule only).
    #[arg(long)]
    lp: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', default_value = "greedy-wnn,hart-cnn,mss,rss,none")]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 10)]
    reps: u64,
    /// Repetition `r` uses seed `seed + r` for its split and scan order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.7)]
    train_fraction: f64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
    /// Report CSV; stdout when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Add a wall-time column (makes the CSV run-dependent).
    #[arg(long)]
    timing: bool,
    /// Print the reports as JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Point CSV; a `weight` column supplies the weights.
    #[arg(long, short, conflicts_with = "uniform", required_unless_present = "uniform")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    label_column: String,
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    /// Instead of a file, draw this many points uniformly from the unit cube.
    #[arg(long)]
    uniform: Option<usize>,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 1000)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CompressArgs {
    #[command(flatten)]
    input: InputArgs,
    /// `greedy-wnn` or `exact-wnn`.
    #[arg(long, default_value = "greedy-wnn")]
    method: Method,
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: u64,
}

#[derive(Debug, Args)]
struct ReconstructArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    /// Condensed CSV with a `weight` column.
    #[arg(long, short)]
    output: PathBuf,
    /// Dataset to measure the reconstructed classifier's error on.
    #[arg(long)]
    check: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    label_column: String,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    permutation_invariant: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(commands::EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(commands::EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(commands::EXIT_USAGE);
        }
    }
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
