//! Command-line front end: argument parsing, config layering and the
//! `evaluate`, `compare`, `curves`, `sweep-filter` and `fuzz` commands.

pub mod args;
pub mod commands;
pub mod manifest;
pub mod settings;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command};
pub use settings::UsageError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let result = match &cli.command {
        Command::Evaluate(a) => commands::run_evaluate(a, &argv),
        Command::Compare(a) => commands::run_compare(a, &argv),
        Command::Curves(a) => commands::run_curves(a, &argv),
        Command::SweepFilter(a) => commands::run_sweep(a, &argv),
        Command::Fuzz(a) => commands::run_fuzz(a, &argv),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) if e.downcast_ref::<UsageError>().is_some() => {
            eprintln!("error: {e:#}");
            eprintln!("run `deteval --help` for usage");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_DATA
        }
    }
}
