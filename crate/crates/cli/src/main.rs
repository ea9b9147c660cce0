mod args;
mod commands;
mod failure;
mod ingest;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli.command, cli.verbose) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("catt: {f}");
            f.exit_code()
        }
    }
}
