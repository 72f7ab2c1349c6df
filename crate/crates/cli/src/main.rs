use std::process::ExitCode;

use fdcell_cli::CliError;

fn main() -> ExitCode {
    match fdcell_cli::run(std::env::args().collect()) {
        Ok(report) if report.failed_checks > 0 => ExitCode::FAILURE,
        Ok(_) => ExitCode::SUCCESS,
        Err(CliError::Clap(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
