use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = cica_cli::Cli::parse();
    match cica_cli::run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(dump) = e.telemetry() {
                eprintln!("{dump}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
