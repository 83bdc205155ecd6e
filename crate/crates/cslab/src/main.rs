use std::process::ExitCode;

use clap::Parser;

use cslab::cli::{run, Cli, Outcome};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Computed) => ExitCode::SUCCESS,
        Ok(Outcome::ViolationFound) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
