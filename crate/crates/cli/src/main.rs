use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ep_cli::run(std::env::args_os()))
}
