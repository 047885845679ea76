//! Batch front end: scenario files in, trajectory CSVs and JSON verification
//! reports out.
//!
//! Exit codes: 0 success, 2 configuration error, 3 tolerance breach in
//! `compare`/`check`.

mod commands;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Default output directory when neither `--out` nor the scenario sets one.
pub const OUT_DIR_ENV: &str = "GWP_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent input; exit 2.
    Config(String),
    /// A run failed at runtime; exit 1.
    Runtime(String),
    /// compare/check exceeded its tolerance; exit 3.
    Breach(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
            CliError::Breach(msg) => write!(f, "tolerance breach: {msg}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "gwp", about = "Gaussian wave packet dynamics on the Siegel upper half space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the trajectories described by a TOML scenario file.
    Simulate {
        file: PathBuf,
        /// Output directory (overrides the scenario and GWP_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Flag sweep points whose energy drift exceeds this bound.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run both formulations from matched initial data and report the
    /// projection and phase-dictionary gaps.
    Compare {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Gap tolerance (overrides the scenario's [compare] table).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run a verification suite: geometry, reduction, dynamics, or all.
    Check {
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Restrict to a single dimension (default: d = 1, 2, 3).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate { file, out, tol } => commands::simulate(&file, out.as_deref(), tol),
        Command::Compare { file, out, tol } => commands::compare(&file, out.as_deref(), tol),
        Command::Check { suite, seed, samples, dim, out } => {
            commands::check(&suite, seed, samples, dim, out.as_deref())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("gwp: {err}");
            match err {
                CliError::Config(_) => ExitCode::from(2),
                CliError::Runtime(_) => ExitCode::from(1),
                CliError::Breach(_) => ExitCode::from(3),
            }
        }
    }
}
