use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let code = ds2sim::cli::run_cli(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
