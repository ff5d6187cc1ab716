mod cli;
mod commands;

use std::panic;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::commands::{Failure, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = panic::catch_unwind(|| match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Transform(a) => commands::transform(a),
        Command::Density(a) => commands::density(a),
        Command::Axioms(a) => commands::axioms(a),
        Command::Theorems(a) => commands::theorems(a),
    });
    match run {
        Ok(Ok(Outcome::Computed)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::ChecksFailed)) => ExitCode::from(1),
        Ok(Err(Failure::Input(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Internal(msg))) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
        // The panic hook has already printed the message.
        Err(_) => ExitCode::from(3),
    }
}
