use std::process::ExitCode;

fn main() -> ExitCode {
    dcae_cli::run(std::env::args_os())
}
