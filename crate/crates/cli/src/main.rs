//! `sopt` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "sopt",
    version,
    about = "Optimal partial transport in 1-D and sliced form"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a 1-D partial transport problem between two point lists.
    Opt1d {
        /// Source coordinates, one per line.
        x: PathBuf,
        /// Target coordinates, one per line.
        y: PathBuf,
        /// Cost of destroying or creating one point.
        #[arg(long)]
        lambda: f64,
        /// Ground cost exponent (> 1).
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Check the optimality certificate; exit 1 if it fails.
        #[arg(long)]
        verify: bool,
    },
    /// Time sorting plus solving on synthetic instances and print CSV.
    Bench {
        #[arg(long, default_value = "uniform")]
        generator: String,
        /// Comma-separated source sizes.
        #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000,8000")]
        sizes: Vec<usize>,
        /// Comma-separated penalties; defaults depend on the generator.
        #[arg(long, value_delimiter = ',')]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        /// Extra target points (m = n + extra).
        #[arg(long, default_value_t = 1000)]
        extra: usize,
        #[arg(long)]
        seed: u64,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sliced partial transport between two point clouds.
    Sopt {
        x: PathBuf,
        y: PathBuf,
        /// Point dimension; inferred from the first line when omitted.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        lambda: f64,
        /// Number of random directions.
        #[arg(long, default_value_t = 100)]
        slices: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Write per-slice values as CSV.
        #[arg(long)]
        per_slice: Option<PathBuf>,
    },
    /// Estimate a rotation, scale and translation mapping X onto Y.
    Register {
        x: PathBuf,
        y: PathBuf,
        /// Number of clean (noise-free) source points.
        #[arg(long)]
        clean: usize,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long)]
        seed: u64,
        /// Initial λ; defaults to the squared projected diameter of Y.
        #[arg(long)]
        lambda0: Option<f64>,
        /// Ground-truth transform (JSON with R, s, beta) to report the error.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Write the per-iteration λ and match count as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Recolour a PPM image towards the palette of another.
    Color {
        source: PathBuf,
        target: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        lambda: f64,
        /// Source palette size.
        #[arg(long, default_value_t = 500)]
        k: usize,
        /// Target palette size; defaults to `k`.
        #[arg(long)]
        target_k: Option<usize>,
        /// Sliced transport iterations.
        #[arg(long, default_value_t = 300)]
        iterations: usize,
        #[arg(long, default_value_t = 20)]
        kmeans_iters: usize,
        #[arg(long)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
