use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = dqc_cli::Cli::parse();
    match dqc_cli::run(&cli, &mut std::io::stdout()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
