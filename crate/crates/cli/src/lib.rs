//! Front end for the `kenclose` solvers: instance parsing, generation,
//! solving, oracle verification and benchmarking.

pub mod args;
pub mod input;
pub mod report;
pub mod run;

use std::io::Write;

use clap::Parser;

/// Parses `argv`, runs the command and prints its output. Returns the
/// process exit status.
pub fn main_with<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run::run(&cli.command) {
        Ok(lines) => {
            let mut out = std::io::stdout().lock();
            for l in lines {
                if writeln!(out, "{l}").is_err() {
                    break;
                }
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
