use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (code, out) = chaintrace::cli::run(std::env::args_os());
    if code == chaintrace::cli::EXIT_OK || code == chaintrace::cli::EXIT_FAIL || code == chaintrace::cli::EXIT_FALSIFIED
    {
        let _ = std::io::stdout().write_all(out.as_bytes());
    } else {
        let _ = std::io::stderr().write_all(out.as_bytes());
    }
    ExitCode::from(code as u8)
}
