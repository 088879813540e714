use std::process::ExitCode;

fn main() -> ExitCode {
    prisel_cli::run(std::env::args_os())
}
