//! Command-line front end of the toolkit: input files, validation and report output.

pub mod cli;
pub mod commands;
pub mod config;
pub mod format;
pub mod input;

use clap::Parser;
use mellin_core::Error;
use std::ffi::OsString;

/// Exit status for invalid input.
pub const EXIT_INVALID: i32 = 2;
/// Exit status for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "CONEWEDGE_THREADS";

/// Runs the command line `argv` (program name first) and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match cli::Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return EXIT_INVALID;
    }
    match commands::execute(&cli.command, &cli.global) {
        Ok(()) => 0,
        Err(e) => {
            report(&e);
            exit_code(&e)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Some(raw) = std::env::var_os(THREADS_VAR) else {
        return Ok(());
    };
    let n = raw
        .to_str()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
    // The global pool can only be built once per process; later calls keep the first size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn report(e: &Error) {
    match e {
        Error::Validation(list) => {
            eprintln!("error: {} problem(s) with the input", list.len());
            for item in list {
                eprintln!("  - {item}");
            }
        }
        other => eprintln!("error: {other}"),
    }
}

/// Exit status for a failed command: 2 for input problems, 3 for numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_INVALID
    } else {
        EXIT_NUMERICAL
    }
}
