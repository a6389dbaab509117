use std::process::ExitCode;

use ifdetect::cli::{self, CliError};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("IFDETECT_LOG", "warn")).init();
    let mut stdout = std::io::stdout().lock();
    match cli::run(std::env::args_os(), &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Args(e)) => {
            // help and version land here too
            let _ = e.print();
            ExitCode::from(CliError::Args(e).exit_code() as u8)
        }
        Err(e) => {
            eprintln!("ifdetect: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
