//! Command-line front end for the twin experiment.
//!
//! Exit codes: 0 success, 1 I/O or format error, 2 configuration error,
//! 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use model_error::harness::{compare_runs, run_twin_experiment, write_outputs, ExperimentConfig};
use model_error::Error;

#[derive(Parser)]
#[command(version, about = "Model-error moment estimation from 3DVar analyses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a twin experiment and write its diagnostics.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `seed` from the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `output_dir` from the config file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print error ratios (a / b) between two run directories as JSON.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, seed, out } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(out) = out {
                cfg.output_dir = out;
            }
            let result = run_twin_experiment(&cfg)?;
            let manifest = write_outputs(&result, &cfg.output_dir)?;
            eprintln!(
                "wrote {} files to {} (rms analysis error {:.3e}, L = {:.4})",
                manifest.files.len(),
                cfg.output_dir.display(),
                result.rms_analysis_error(),
                result.lipschitz.value
            );
            Ok(())
        }
        Command::Compare { a, b } => {
            let cmp = compare_runs(&a, &b)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&cmp).expect("comparison serializes")
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_config_error() {
                2
            } else if e.is_numerical() {
                3
            } else {
                1
            };
            ExitCode::from(code)
        }
    }
}
