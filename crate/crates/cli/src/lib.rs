//! Command-line front end: argument parsing, command execution and report
//! rendering. `main` only wires [`run`] to the process exit code.

pub mod args;
pub mod commands;
pub mod render;
pub mod report;

use std::io::Write;
use std::process::ExitCode;

use delay_margin::Error;

pub use args::{Cli, Command, Format};
pub use commands::{execute, Outcome};
pub use report::ReportDocument;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INTERNAL: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Analysis(#[from] Error),
    #[error("cannot write output: {0}")]
    Output(#[source] std::io::Error),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
}

impl CliError {
    /// 2 for rejected inputs (unstable delay-free system, root at s = 0,
    /// unreadable or malformed matrices, bad options, resource guard);
    /// 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Analysis(e) => match e {
                Error::UnstableDelayFree { .. }
                | Error::ZeroRoot
                | Error::ResourceGuard { .. }
                | Error::Io { .. }
                | Error::Parse { .. }
                | Error::Format { .. }
                | Error::NotSquare { .. }
                | Error::DimensionMismatch { .. }
                | Error::NonFinite { .. }
                | Error::Empty
                | Error::InvalidConfig(_) => EXIT_PRECONDITION,
                _ => EXIT_INTERNAL,
            },
            _ => EXIT_INTERNAL,
        }
    }
}

/// Runs one command, writes its output and returns the status.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let outcome = execute(&cli.command)?;
    let output = match &cli.command {
        Command::Margin(a) | Command::Crossings(a) => &a.output,
        Command::Baseline(a) => &a.output,
        Command::Simulate(a) => &a.output,
        Command::MemEstimate(a) => &a.output,
        Command::Validate(a) => &a.output,
    };
    let format = output.format.unwrap_or_else(|| commands::default_format(&cli.command));
    let rendered = outcome.render(format)?;
    match &output.out {
        Some(path) => std::fs::write(path, rendered).map_err(CliError::Output)?,
        None => std::io::stdout()
            .lock()
            .write_all(rendered.as_bytes())
            .map_err(CliError::Output)?,
    }
    match outcome.failure() {
        Some(msg) => Err(CliError::ValidationFailed(msg)),
        None => Ok(()),
    }
}

pub fn main_with(cli: &Cli) -> ExitCode {
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
