//! `lpsieve`: sieve constants, instance verification, kernel diagnostics,
//! extremal search and bound comparison tables.
//!
//! Exit codes: 0 success, 1 a mathematical identity or inequality failed,
//! 2 the input was rejected.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};

use error::{CliError, EXIT_INPUT};
use output::Format;

#[derive(Debug, Parser)]
#[command(name = "lpsieve", version, about = "Large sieve constants for L^p norms of trigonometric polynomials")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file; options given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Relative tolerance for adaptive quadrature.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for every random choice; echoed in output headers.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Every constant for one (N, delta, p).
    Bound(BoundArgs),
    /// Check the sieve inequality on one instance.
    Verify(VerifyArgs),
    /// Extremal kernel and, with --diagnose, its inverse measure.
    Kernel(KernelArgs),
    /// Derivative-free search for polynomials with a large sieve ratio.
    Search(SearchArgs),
    /// Table of bounds over a grid of (N, delta, p).
    Compare(CompareArgs),
    /// Seeded random campaign of verify trials.
    Campaign(CampaignArgs),
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(short = 'N', long = "degree")]
    pub n: u32,
    #[arg(short, long)]
    pub p: f64,
    /// Separation: a float, or pi/K, M pi/K, M*pi/K.
    #[arg(long)]
    pub delta: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Replay file written by campaign, search or verify.
    #[arg(long, conflicts_with_all = ["poly", "random", "nodes", "equispaced", "strategy"])]
    pub replay: Option<PathBuf>,
    /// Polynomial JSON file.
    #[arg(long, conflicts_with = "random")]
    pub poly: Option<PathBuf>,
    /// Random Gaussian coefficients of degree N drawn from --seed.
    #[arg(long)]
    pub random: bool,
    #[arg(short = 'N', long = "degree")]
    pub n: Option<u32>,
    #[arg(short, long)]
    pub p: Option<f64>,
    /// Node set JSON file.
    #[arg(long, conflicts_with_all = ["equispaced", "strategy"])]
    pub nodes: Option<PathBuf>,
    /// R equispaced nodes.
    #[arg(long, conflicts_with = "strategy")]
    pub equispaced: Option<usize>,
    /// equispaced:R, clustered:C:GAP or random-separated:R:GRID.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Write the checked instance as a replay file.
    #[arg(long)]
    pub instance_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(short = 'N', long = "degree")]
    pub n: u32,
    #[arg(short, long)]
    pub p: f64,
    /// Build the inverse measure and check it.
    #[arg(long)]
    pub diagnose: bool,
    /// Target for the reciprocal series, relative to its mean.
    #[arg(long, default_value_t = lpsieve::inverse_op::DEFAULT_SERIES_TOL)]
    pub series_tol: f64,
    /// Allowed |p_u(n) û(n) - 1|.
    #[arg(long, default_value_t = 1e-6)]
    pub interp_tol: f64,
    /// Write the atomic measure JSON (with --diagnose).
    #[arg(long)]
    pub measure_out: Option<PathBuf>,
    /// Write the kernel JSON.
    #[arg(long)]
    pub kernel_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(short = 'N', long = "degree")]
    pub n: u32,
    #[arg(short, long)]
    pub p: f64,
    /// Node placement; defaults to 2N equispaced nodes.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Perturbation attempts per restart.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 4)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    #[arg(long, default_value_t = 0.7)]
    pub decay: f64,
    /// Plot data: restart, iteration, tightness.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Replay file for the best instance.
    #[arg(long)]
    pub best_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Exponents: comma list of values or LO:HI[:STEP] ranges.
    #[arg(long)]
    pub pgrid: String,
    /// Degrees, comma separated.
    #[arg(short = 'N', long = "degree")]
    pub n: String,
    /// Separations, comma separated.
    #[arg(long)]
    pub delta: String,
    /// Plot data: p, bound name, value (single N and delta only).
    #[arg(long)]
    pub plot_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Largest degree; degrees are drawn from 1..=N.
    #[arg(short = 'N', long = "degree", default_value_t = 16)]
    pub n: u32,
    /// Use N for every trial instead of drawing it.
    #[arg(long)]
    pub fixed_degree: bool,
    #[arg(long, default_value = "1,2,3,4")]
    pub pgrid: String,
    /// Comma list of equispaced, clustered, random-separated.
    #[arg(long, default_value = "equispaced,clustered")]
    pub strategies: String,
    /// Replay file for the instance with the largest ratio.
    #[arg(long)]
    pub replay_out: Option<PathBuf>,
}

fn run() -> Result<u8, CliError> {
    let args = config::merge(&Cli::command(), std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return Ok(code);
        }
    };
    commands::dispatch(&cli)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
