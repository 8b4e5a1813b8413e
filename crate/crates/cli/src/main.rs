//! `plateau-lab`: runs gradient-variance sweeps, closed-form tables and the
//! verification suites, writing CSV or JSON.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0} check(s) failed")]
    Verification(usize),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] plateau_core::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(plateau_core::Error::ResourceGuard { .. }) => 3,
            CliError::Verification(_) | CliError::Io(_) | CliError::Core(_) => 1,
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = match config::Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return Ok(());
        }
        Err(e) => {
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            return Err(CliError::Usage(
                first.trim_start_matches("error: ").to_string(),
            ));
        }
    };
    let cfg = config::resolve(cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("workers: {e}")))?;
    pool.install(|| commands::dispatch(&cfg))
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
