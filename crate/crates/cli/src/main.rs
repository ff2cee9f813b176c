use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod config;
mod error;
mod parse;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match config::resolve(cli).and_then(|run| commands::execute(&run)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
