use std::process::ExitCode;

use clap::Parser;
use delay_margin_cli::Cli;

fn main() -> ExitCode {
    delay_margin_cli::main_with(&Cli::parse())
}
