//! Command-line front end for the `ratfit` library.
//!
//! Four subcommands cover the workflow: `fit` reads sampled data and writes a
//! fitted approximant plus a solve report, `demo` synthesizes one of the
//! built-in targets (optionally with seeded noise) and then fits it, `eval`
//! evaluates a stored approximant at fresh nodes, and `diagnose` re-checks an
//! approximant against data and reports the optimality certificates.
//!
//! Exit codes: 0 when the solve converged (or the target was exactly
//! representable), 2 when the iteration budget ran out before the duality gap
//! closed (outputs are still written), 1 on any error.

pub mod args;
pub mod commands;
pub mod demo;
pub mod problem;
pub mod report;

pub use args::Cli;
pub use commands::{execute, CliError};

use clap::Parser;

/// Parses `std::env::args` and runs the chosen command, translating every
/// outcome to a process exit code.
pub fn run_from_env() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version land here too; only genuine usage errors
            // are failures.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match commands::execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}
