use std::io::Write;
use std::process::ExitCode;

use coordsolve::cli::{run, CliError};

fn main() -> ExitCode {
    let out = match run(std::env::args_os()) {
        Ok(out) | Err(CliError::Help(out)) => out,
        Err(e) => {
            eprintln!("coordsolve: {}", e.to_string().trim_end());
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(_) => ExitCode::from(1),
    }
}
