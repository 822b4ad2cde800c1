//! `paving`: generate test matrices, search for pavings, verify moment
//! inequalities, sweep moments against bounds, and evaluate constants.

mod cli;
mod cmd;
mod config;
mod exit;

use std::process::ExitCode;

use clap::Parser;

use cli::{Cli, Command};
use exit::Outcome;

fn main() -> ExitCode {
    let args = match config::expand_args(std::env::args_os().collect()) {
        Ok(args) => args,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit::USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::SUCCESS });
        }
    };
    let result = match cli.command {
        Command::Gen(args) => cmd::gen::run(&args),
        Command::Pave(args) => cmd::pave::run(&args),
        Command::Verify(args) => cmd::verify::run(&args),
        Command::Scan(args) => cmd::scan::run(&args),
        Command::Bound(args) => cmd::bound::run(&args),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::from(exit::SUCCESS),
        Ok(Outcome::Violation) => ExitCode::from(exit::VIOLATION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit::code_for(&e))
        }
    }
}
