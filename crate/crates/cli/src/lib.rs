//! Experiment harness for the `listdec` estimator: dataset generation,
//! estimation runs, halfspace runs and parameter sweeps, with CSV output and
//! JSON run logs.
//!
//! Exit codes: 0 success, 1 internal error, 2 malformed input, 3 node budget
//! exhausted.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod spec;

use clap::Parser;

pub use commands::{dispatch, execute, Report};
pub use config::{Command, ExperimentConfig, Params};
pub use error::{CliError, CliResult, EXIT_BUDGET, EXIT_INPUT, EXIT_INTERNAL, EXIT_OK};
pub use spec::{AdversarySpec, ModelSpec};

/// Parses `args`, runs the command, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run_parsed(&cli) {
        Ok(report) => {
            if !report.summary.is_empty() {
                eprintln!("{}", report.summary);
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_parsed(cli: &args::Cli) -> CliResult<Report> {
    let cfg = cli.to_config()?;
    match cli.threads {
        Some(0) => Err(CliError::input("thread count must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?
            .install(|| execute(&cfg)),
        None => execute(&cfg),
    }
}
