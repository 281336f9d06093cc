//! `robust-coreset`: build and evaluate coresets for clustering with outliers.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "robust-coreset", version = env!("CARGO_PKG_VERSION"))]
#[command(about = "Coresets for (k, z, m)-robust clustering, baselines, solvers and benchmarks")]
pub struct Cli {
    /// Maximum number of worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true, env = "ROBUST_CORESET_OUT", default_value = "out")]
    pub out_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Input CSV with a header row.
    pub input: Option<PathBuf>,
    /// Generate data instead, e.g. `clusters=5,per-cluster=4000,dim=5,outliers=200`.
    /// Optional keys: separation, spread, outlier-distance, seed.
    #[arg(long, conflicts_with = "input")]
    pub synth: Option<String>,
    /// Comma separated column names or zero-based indices (default: all).
    #[arg(long)]
    pub columns: Option<String>,
    /// Keep a uniform sample of this many rows.
    #[arg(long)]
    pub subsample: Option<usize>,
    /// Seed of the row subsample.
    #[arg(long, default_value_t = 0)]
    pub data_seed: u64,
    /// Rescale every column to zero mean and unit variance.
    #[arg(long)]
    pub standardize: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ProblemArgs {
    /// Number of centers.
    #[arg(long)]
    pub k: usize,
    /// Distance exponent: a number >= 1, `median` (1) or `means` (2).
    #[arg(long, default_value = "2", value_parser = parse_z)]
    pub z: f64,
    /// Number of outliers, or `auto` to pick it from the distance distribution.
    #[arg(long, default_value = "0")]
    pub m: String,
}

fn parse_z(s: &str) -> Result<f64, String> {
    let z = match s {
        "median" => 1.0,
        "means" => 2.0,
        _ => s.parse::<f64>().map_err(|e| e.to_string())?,
    };
    if z.is_finite() && z >= 1.0 {
        Ok(z)
    } else {
        Err(format!("z must be at least 1, got {s}"))
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build one coreset and write it as CSV with a JSON build report.
    Coreset {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Coreset size N.
        #[arg(long = "n")]
        size: usize,
        /// ours, us, oaus or ss.
        #[arg(long, default_value = "ours")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Empirical error of a coreset over random center sets.
    Eval {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Size of the coreset to build (ignored with --coreset).
        #[arg(long = "n")]
        size: Option<usize>,
        #[arg(long, default_value = "ours")]
        method: String,
        /// Evaluate this coreset CSV instead of building one.
        #[arg(long)]
        coreset: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        center_sets: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mean empirical error against coreset size, per method.
    SweepSize {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Coreset sizes (default m+300, m+800, m+1300).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 500)]
        center_sets: usize,
        #[arg(long, value_delimiter = ',', default_value = "ours,us,oaus,ss")]
        methods: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mean empirical error against the number of outliers at a fixed N - m.
    SweepM {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "2", value_parser = parse_z)]
        z: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        m_values: Vec<usize>,
        /// N - m.
        #[arg(long, default_value_t = 800)]
        extra: usize,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, default_value_t = 500)]
        center_sets: usize,
        #[arg(long, value_delimiter = ',', default_value = "ours,us,oaus,ss")]
        methods: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a robust clustering solver on the data or on a coreset file.
    Solve {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "0")]
        m: String,
        /// ll (Lloyd, z = 2) or ls (local search, z = 1).
        #[arg(long, default_value = "ll")]
        solver: String,
        /// Solve on this coreset CSV; costs are still reported on the data.
        #[arg(long)]
        coreset: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        /// Relative improvement below which the solver stops.
        #[arg(long)]
        tol: Option<f64>,
        /// Candidate centers for ls, drawn from the data.
        #[arg(long, default_value_t = 100)]
        pool_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Time a solver on the full data and on a coreset.
    BenchSpeedup {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "0")]
        m: String,
        #[arg(long = "n")]
        size: usize,
        #[arg(long, default_value = "ll")]
        solver: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Suggest m from the break in the sorted distance curve.
    SuggestM {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write a synthetic dataset as CSV, with its ground truth as JSON.
    GenSynth {
        #[arg(long)]
        synth: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
