use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let args = cara::cli::CliArgs::parse();
    match cara::cli::run_cli(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
