use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(epikit::cli::run() as u8)
}
