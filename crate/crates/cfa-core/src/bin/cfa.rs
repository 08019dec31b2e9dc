use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(cfa_core::cli::run(std::env::args()) as u8)
}
