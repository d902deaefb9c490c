//! `afl`: command-line front end for the Active Flux advection toolkit.
//!
//! Exit codes: 0 success, 1 configuration error, 2 solver blow-up,
//! 3 verification failure.

mod config;
mod convergence;
mod run;
mod spectra;
mod svg;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file, or other setup problem (exit 1).
    Config(String),
    /// The solver produced a non-finite state (exit 2).
    BlowUp(String),
    /// One or more verification checks failed (exit 3).
    VerifyFailed,
}

#[derive(Parser)]
#[command(
    name = "afl",
    version,
    about = "Parameterized Active Flux schemes for 1D linear advection: experiments, spectra, convergence studies, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one advection experiment and write solution/summary artifacts
    Run(run::RunArgs),
    /// Sweep dissipation and dispersion errors over theta
    Spectra(spectra::SpectraArgs),
    /// Grid-refinement study with experimental orders of convergence
    Convergence(convergence::ConvergenceArgs),
    /// Run the verification battery and write verify.json
    Verify(verify::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return match kind {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };

    let result = match cli.command {
        Command::Run(args) => run::execute(args),
        Command::Spectra(args) => spectra::execute(args),
        Command::Convergence(args) => convergence::execute(args),
        Command::Verify(args) => verify::execute(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::BlowUp(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::VerifyFailed) => ExitCode::from(3),
    }
}
