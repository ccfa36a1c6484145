use std::process::ExitCode;

fn main() -> ExitCode {
    lieflow::cli::run(std::env::args_os())
}
