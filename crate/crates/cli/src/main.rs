use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = match csbi_cli::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Usage errors are input errors; help and version are not errors.
            let code = if e.use_stderr() { csbi_cli::commands::EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let out = csbi_cli::run(cli);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
