use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use gframemod_cli::commands::{run, Cli};
use gframemod_cli::report::exit;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::USAGE),
            };
        }
    };
    match run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.code),
        Err(e) => {
            eprintln!("gframemod: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
