//! `cospricer <experiment> --config <file> --out <csv>`
//!
//! Exit codes: 0 on success, 1 for configuration problems (unreadable or
//! inconsistent config, bad CLI usage, unwritable output), 2 when a
//! required computation does not converge.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use cospricer::{config, experiments, Experiment, RunError};

#[derive(Parser)]
#[command(name = "cospricer", about = "Cosine-expansion pricing experiments")]
struct Cli {
    /// Which experiment to run; must match the config's `experiment` field.
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON experiment description.
    #[arg(long)]
    config: PathBuf,
    /// Where to write the CSV output.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let config = match config::load(&cli.config) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
    };
    if config.experiment() != cli.experiment {
        eprintln!(
            "config error: {}",
            config::ConfigError::ExperimentMismatch {
                requested: cli.experiment,
                found: config.experiment(),
            }
        );
        return ExitCode::from(1);
    }
    let output = match experiments::run(&config) {
        Ok(output) => output,
        Err(RunError::Config(e)) => {
            eprintln!("config error: {e}");
            return ExitCode::from(1);
        }
        Err(e @ RunError::NonConvergence(_)) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = output.table.write(&cli.out) {
        eprintln!("cannot write {}: {e}", cli.out.display());
        return ExitCode::from(1);
    }
    for line in &output.lines {
        println!("{line}");
    }
    println!("wrote {}", cli.out.display());
    ExitCode::SUCCESS
}
