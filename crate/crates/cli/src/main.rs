//! Command-line front end: scenario ingestion and generation, deterministic
//! and robust interdiction runs, and a batch benchmark harness.
//!
//! Results go to stdout as single-line JSON; files are written only through
//! explicit arguments. Exit codes: 0 success, 2 input error, 3 numerical
//! failure, 4 oracle truncated.

mod commands;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "flowjam", version, about = "Adversarial-flow network interdiction toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse an edge-list file and emit an acyclic skeleton JSON.
    Ingest {
        /// Edge-list input: tab- or space-separated "tail head" lines, '#' comments.
        input: PathBuf,
        /// Skeleton JSON output path.
        output: PathBuf,
        /// Accepted for pipeline uniformity; ingestion is deterministic.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sample a scenario onto a skeleton or a synthetic layered graph.
    Generate {
        /// Scenario JSON output path.
        output: PathBuf,
        /// Skeleton JSON produced by `ingest`.
        #[arg(long, conflicts_with = "synthetic")]
        skeleton: Option<PathBuf>,
        /// Synthetic layered graph spec: `layers,width[,edge_prob[,skip_prob]]`.
        #[arg(long)]
        synthetic: Option<String>,
        /// Number of user paths per candidate set.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Reject user paths sharing edges within a candidate set.
        #[arg(long)]
        disjoint: bool,
        /// Number of candidate sets; omitted means a deterministic scenario.
        #[arg(long)]
        xi: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Resample the interdictor pair until its s-t path count fits.
        #[arg(long)]
        max_paths: Option<u64>,
        /// Lower bound on the interdictor pair's s-t path count.
        #[arg(long, default_value_t = 1)]
        min_paths: u64,
        #[arg(long, default_value_t = 20.0)]
        capacity_mean: f64,
        #[arg(long, default_value_t = 3.0)]
        capacity_std: f64,
    },
    /// Deterministic interdiction on a scenario with known user paths.
    Det {
        scenario: PathBuf,
        /// Recursion depth; defaults to ceil(log2 n).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 2)]
        anchors: usize,
        /// Also solve exactly by enumeration and report the ratio.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 5000)]
        oracle_cap: usize,
    },
    /// Robust interdiction over a scenario's uncertainty set.
    Robust {
        scenario: PathBuf,
        /// Recursion depth; defaults to ceil(log2 n).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = 2)]
        anchors: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 8)]
        n0: u64,
        /// "full" sweeps every target; `geom:<factor>` subsamples
        /// geometrically (experimental, weakens the guarantee).
        #[arg(long, default_value = "full")]
        kappa_grid: String,
        /// Also solve the exact maximin LP and report the ratio.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 5000)]
        oracle_cap: usize,
    },
    /// Batch runner over a scenario glob; writes rows and a summary CSV.
    Bench {
        /// Glob for scenario JSON files, e.g. "scenarios/*.json".
        pattern: String,
        /// Row CSV output path; the summary lands next to it.
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated recursion depths to sweep.
        #[arg(long, default_value = "2")]
        depths: String,
        /// Comma-separated anchor counts to sweep.
        #[arg(long, default_value = "2")]
        anchors: String,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long, default_value_t = 8)]
        n0: u64,
        #[arg(long, default_value = "full")]
        kappa_grid: String,
        /// Compute oracle values and ratios for every run.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 5000)]
        oracle_cap: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Ingest { input, output, seed } => commands::ingest(&input, &output, seed),
        Command::Generate {
            output,
            skeleton,
            synthetic,
            k,
            disjoint,
            xi,
            seed,
            max_paths,
            min_paths,
            capacity_mean,
            capacity_std,
        } => commands::generate(commands::GenerateArgs {
            output,
            skeleton,
            synthetic,
            k,
            disjoint,
            xi,
            seed,
            max_paths,
            min_paths,
            capacity_mean,
            capacity_std,
        }),
        Command::Det {
            scenario,
            depth,
            anchors,
            oracle,
            oracle_cap,
        } => commands::det(&scenario, depth, anchors, oracle, oracle_cap),
        Command::Robust {
            scenario,
            depth,
            anchors,
            epsilon,
            n0,
            kappa_grid,
            oracle,
            oracle_cap,
        } => commands::robust(&scenario, depth, anchors, epsilon, n0, &kappa_grid, oracle, oracle_cap),
        Command::Bench {
            pattern,
            out,
            depths,
            anchors,
            epsilon,
            n0,
            kappa_grid,
            oracle,
            oracle_cap,
        } => commands::bench(commands::BenchArgs {
            pattern,
            out,
            depths,
            anchors,
            epsilon,
            n0,
            kappa_grid,
            oracle,
            oracle_cap,
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
