//! `gfwigner`: discrete Wigner functions over GF(p^n) from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Outputs, Report};

#[derive(Debug)]
pub enum Failure {
    Input(String),
}

impl From<gfwigner::Error> for Failure {
    fn from(e: gfwigner::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

#[derive(Parser)]
#[command(name = "gfwigner", version, about = "Discrete Wigner functions over finite fields")]
struct Cli {
    /// Field spec JSON file, or an inline size such as `8` or `3^2`.
    #[arg(long, global = true, default_value = "2^2")]
    field: String,
    /// `primitive`, `trace`, or `radix[:poly|self-dual|normal|e1,e2,…]`.
    #[arg(long, global = true)]
    ordering: Option<String>,
    /// `canonical[:basis]`, `signs:<path>`, `h:<path>`, or a rotation-set JSON file.
    #[arg(long, global = true, default_value = "canonical")]
    rotations: String,
    /// State file or name: gf4-paper-state, gf8-paper-state, vacuum,
    /// maximally-mixed, random:<seed>, line:<mu>,<nu>, vertical:<nu>.
    #[arg(long, global = true)]
    state: Option<String>,
    /// Comma-separated shot counts for simulated tomography.
    #[arg(long, global = true, value_delimiter = ',')]
    shots: Vec<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Directory for CSV/JSON artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Field parameters, trace table and ordering table.
    FieldInfo,
    /// Check the four kernel postulates.
    KernelCheck {
        /// Random covariance tuples instead of the default mode.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Wigner grid, marginals and line sums of a state.
    Wigner,
    /// Count distinct Wigner functions over all shift functions.
    Enumerate,
    /// Tomography round trip, shot-noise study, or reconstruction from a file.
    Tomography {
        /// Reconstruct from this tomogram JSON instead of simulating.
        #[arg(long)]
        tomogram: Option<String>,
    },
    /// Build and check the mutually unbiased bases.
    Mub,
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let s = config::setup(&cli.field, cli.ordering.as_deref(), &cli.rotations)?;
    let out = Outputs::new(cli.out.as_deref())?;
    let state = cli.state.as_deref();
    match &cli.command {
        Command::FieldInfo => commands::field_info(&s, &out),
        Command::KernelCheck { samples } => commands::kernel_check(&s, *samples, cli.seed, &out),
        Command::Wigner => commands::wigner(&s, state, &out),
        Command::Enumerate => commands::enumerate(&s, state, &out),
        Command::Tomography { tomogram } => commands::tomography(&s, state, tomogram.as_deref(), &cli.shots, cli.seed, &out),
        Command::Mub => commands::mub(&s, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            println!("{}", serde_json::to_string_pretty(&report.body).expect("json values serialize"));
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
