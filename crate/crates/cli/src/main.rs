mod commands;
mod config;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::verify::Suite;

/// Numerical verification of bubble-superposition solutions of Δu + K u^{(n+2)/(n-2)} = 0.
#[derive(Parser, Debug)]
#[command(name = "confcurv", version, about)]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Source {
    /// JSON run configuration.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,

    /// Built-in configuration: unbounded-n3, unbounded-n4, growth-quadratic, growth-exp.
    #[arg(long)]
    pub preset: Option<String>,

    /// Output directory; without it the main report goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Override the relative quadrature tolerance.
    #[arg(long)]
    pub rtol: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a construction and check its defining inequalities.
    Construct {
        #[command(flatten)]
        source: Source,
    },
    /// Run verification suites on a constructed or stored field.
    Verify {
        #[command(flatten)]
        source: Source,
        /// Field JSON written by `construct`; replaces the construction in the config.
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Fowler ODE: fixed point, homoclinic orbit, or a necksize family.
    Fowler(commands::FowlerArgs),
    /// Hypothesis diagnostics along a grid of cylinder times s.
    Diagnose {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Merge earlier JSON reports into one summary.
    Report {
        /// Report files; defaults to every *.json in --out.
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global()?;
    }
    match cli.command {
        Command::Construct { source } => commands::construct(&source),
        Command::Verify { source, field, suite } => commands::verify(&source, field.as_deref(), suite),
        Command::Fowler(args) => commands::fowler(&args),
        Command::Diagnose { source, field } => commands::diagnose(&source, field.as_deref()),
        Command::Report { inputs, out } => commands::report(&inputs, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
