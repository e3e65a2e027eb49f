use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = sheafharm::cli::run_command(std::env::args_os());
    let _ = std::io::stdout().write_all(&out.stdout);
    let _ = std::io::stderr().write_all(&out.stderr);
    ExitCode::from(out.code as u8)
}
