use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(eventdyn::cli::run() as u8)
}
