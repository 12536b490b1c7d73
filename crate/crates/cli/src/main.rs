mod args;
mod artifacts;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use dqkit_core::Error;

use crate::args::Cli;

/// 2 for invalid input, 3 for numerical failures.
fn exit_code(e: &Error) -> ExitCode {
    if e.is_numerical() {
        ExitCode::from(3)
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    let outcome = match commands::run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = artifacts::emit(&cli.command, &argv, &outcome) {
        eprintln!("error: {e}");
        return exit_code(&e);
    }
    match &outcome.failure {
        Some(e) => {
            eprintln!("error: {e}");
            exit_code(e)
        }
        None => ExitCode::SUCCESS,
    }
}
