//! `qapprox`: run approximation builds, verifications, Haar sweeps, latin
//! embeddings and semigroup analyses from flat config files.
//!
//! Exit codes: 0 success, 1 config or input error, 2 construction failure,
//! 3 verification failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::Context;
use crate::config::Config;
use crate::output::{Format, OutDir};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("cannot write output: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Construction(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "qapprox", version, about = "Finite quasigroup approximations of locally compact groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (flat key = value file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for artifacts.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads; affects speed only.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Build and verify an approximation of a compact region.
    Build,
    /// Re-verify an approximation artifact.
    Verify,
    /// Sweep the counting functional over refining approximations.
    Haar,
    /// Embed a partial table or a group window into a latin square.
    Latin,
    /// Ideal chain, quotient classes and group extraction for a finite semigroup.
    Semigroup,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let path = cli.config.ok_or_else(|| CliError::Config("--config is required".into()))?;
    let ctx = Context { config: Config::load(&path)?, out: OutDir::create(&cli.out)?, format: cli.format };
    match cli.command {
        Command::Build => commands::build(ctx),
        Command::Verify => commands::verify(ctx),
        Command::Haar => commands::haar(ctx),
        Command::Latin => commands::latin(ctx),
        Command::Semigroup => commands::semigroup(ctx),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qapprox: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
