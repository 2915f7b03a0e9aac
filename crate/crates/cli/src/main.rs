use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = errdist_cli::Cli::parse();
    match errdist_cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
