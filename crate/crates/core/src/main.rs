use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(nspsim::cli::main_with(std::env::args_os()))
}
