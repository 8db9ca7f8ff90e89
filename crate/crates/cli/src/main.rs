//! `superdiff`: reproducible experiment driver.
//!
//! Exit codes: 0 success, 1 configuration error, 2 statistical precondition
//! failure, 3 numerical guard.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use config::RunConfig;
use output::{Meta, VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] superdiff::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(superdiff::Error::Statistical(_)) => 2,
            CliError::Core(superdiff::Error::NumericalGuard(_)) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "superdiff", version, about = "Superdiffusive energy transport experiments")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides `seed` in the config (default 1).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `out` in the config (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads. Affects speed only.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample Ψ under π: Hill estimate and quadrature tail plateau.
    Tail,
    /// Scaled endpoints of the jump process for each (N, t).
    Ctrw,
    /// Stable characteristic-function fit of a `ctrw` endpoint file.
    Fit,
    /// k-averaged Boltzmann profile against the fractional diffusion reference.
    Compare,
    /// Feynman–Kac evaluation of the rescaled Boltzmann solution.
    Boltzmann,
    /// Fractional diffusion of a Gaussian on a periodic box.
    Fracdiff,
    /// Microscopic chain: energy, spectral density and Wigner pairings.
    Chain,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Tail => "tail",
            Command::Ctrw => "ctrw",
            Command::Fit => "fit",
            Command::Compare => "compare",
            Command::Boltzmann => "boltzmann",
            Command::Fracdiff => "fracdiff",
            Command::Chain => "chain",
        }
    }
}

fn to_toml<T: Serialize>(v: &T) -> Result<toml::Value, CliError> {
    toml::Value::try_from(v).map_err(|e| CliError::Config(format!("cannot serialize config: {e}")))
}

/// Resolved settings handed to every subcommand.
pub struct Ctx {
    pub seed: u64,
    pub out: PathBuf,
    pub config: RunConfig,
    pub command: &'static str,
}

impl Ctx {
    /// Provenance for this command: the seed, the model and its own section.
    pub fn meta<T: Serialize>(&self, section: &T) -> Result<Meta, CliError> {
        let mut table = toml::Table::new();
        let seed = match i64::try_from(self.seed) {
            Ok(s) => toml::Value::Integer(s),
            Err(_) => toml::Value::String(self.seed.to_string()),
        };
        table.insert("seed".into(), seed);
        table.insert("model".into(), to_toml(&self.config.model)?);
        table.insert(self.command.into(), to_toml(section)?);
        Ok(Meta {
            version: VERSION,
            command: self.command.to_string(),
            master_seed: self.seed,
            config: config::echo(&table)?,
        })
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))?;
    }
    let config = RunConfig::load(cli.config.as_deref())?;
    let ctx = Ctx {
        seed: cli.seed.or(config.seed).unwrap_or(1),
        out: cli.out.or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
        command: cli.command.name(),
        config,
    };
    let written = match cli.command {
        Command::Tail => commands::tail::run(&ctx)?,
        Command::Ctrw => commands::ctrw::run(&ctx)?,
        Command::Fit => commands::fit::run(&ctx)?,
        Command::Compare => commands::compare::run(&ctx)?,
        Command::Boltzmann => commands::boltzmann::run(&ctx)?,
        Command::Fracdiff => commands::fracdiff::run(&ctx)?,
        Command::Chain => commands::chain::run(&ctx)?,
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("superdiff: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
