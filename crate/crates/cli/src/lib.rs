//! `ffmzm` command-line front end.
//!
//! Every command builds a model from flags or a JSON spec file, calls into
//! the `ffmzm` library and writes one artifact (JSON or CSV) that starts with
//! a metadata block: the spec echo, the library version and the tolerances
//! in force. Output is deterministic for a given configuration and seed.
//!
//! Exit codes: `0` success, `1` invalid configuration, `2` resource guard
//! (chain too long), `3` a physics check failed under `--assert`.

pub mod args;
pub mod commands;
pub mod config;
pub mod report;
pub mod sampling;

use std::ffi::OsString;

use clap::Parser;

pub use args::Cli;
pub use config::{CommandKind, Format, RunConfig, Tolerances};
pub use report::{Cell, Check, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CONFIG: i32 = 1;
pub const EXIT_RESOURCE_GUARD: i32 = 2;
pub const EXIT_PHYSICS_FAILURE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Library(#[from] ffmzm::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot encode output: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Library(e) if e.is_resource_guard() => EXIT_RESOURCE_GUARD,
            _ => EXIT_INVALID_CONFIG,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Outcome of a run: the report and where it went.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub rendered: String,
}

impl Outcome {
    pub fn all_checks_pass(&self) -> bool {
        self.report.checks.iter().all(|c| c.passed)
    }
}

/// Runs one configured command and writes its artifact.
pub fn run(config: &RunConfig) -> CliResult<Outcome> {
    // Single-threaded dense kernels keep results bit-for-bit reproducible.
    faer::set_global_parallelism(faer::Par::Seq);
    let report = commands::execute(config)?;
    let rendered = report::render(&report, config)?;
    match &config.output_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("{}.{}", config.command.name(), config.format.extension()));
            std::fs::write(path, &rendered)?;
        }
        None => print!("{rendered}"),
    }
    Ok(Outcome { report, rendered })
}

/// Parses arguments, runs, and maps the result to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let config = match RunConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    match run(&config) {
        Ok(outcome) => {
            if !config.assert {
                return EXIT_OK;
            }
            for c in &outcome.report.checks {
                eprintln!("{}: {} ({})", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
            }
            if outcome.all_checks_pass() {
                EXIT_OK
            } else {
                EXIT_PHYSICS_FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
