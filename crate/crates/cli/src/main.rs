use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use bxlens_cli::{run, Cli, Outcome, Settings};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match Settings::from_env() {
        Ok(settings) => run(&cli.command, &settings),
        Err(e) => Outcome::usage(e),
    };
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.code as u8)
}
