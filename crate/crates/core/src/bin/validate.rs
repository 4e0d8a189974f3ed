use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use pddl21::cli::{run, RunConfig, EXIT_ERROR};

fn main() -> ExitCode {
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { 0 });
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let status = match run(&config, &mut out) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("validate: {e}");
            EXIT_ERROR
        }
    };
    let _ = out.flush();
    ExitCode::from(status as u8)
}
