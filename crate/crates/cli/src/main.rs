mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Overrides;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation error: {0}")]
    Computation(#[from] sigma_damp::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("suite failure: {0}")]
    SuiteFailure(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::SuiteFailure(_) => 1,
            CliError::Config(_) => 2,
            CliError::Computation(_) | CliError::Io(_) => 3,
        }
    }
}

/// Decay rates and asymptotic profiles of the doubly damped sigma-evolution equation.
#[derive(Debug, Parser)]
#[command(name = "sigma-damp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Overrides,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the configuration and print the derived model quantities
    Validate,
    /// Tabulate the theoretical error exponent per order
    Rates,
    /// Compare jet-built profiles with the closed forms (k = 1, 2)
    Goldens,
    /// Compute error curves and write CSV and JSON per (k, data)
    Curve,
    /// Run the acceptance criteria
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate => commands::validate(&cli.flags),
        Command::Rates => commands::rates(&cli.flags),
        Command::Goldens => commands::goldens(&cli.flags),
        Command::Curve => commands::curve(&cli.flags),
        Command::Verify => commands::verify(&cli.flags),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
