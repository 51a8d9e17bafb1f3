//! Batch front end for the toolkit: JSON-configured runs of the analytic
//! engines, the field simulator, launch sweeps, and scenario evaluations,
//! with reproducible manifests alongside every output.

pub mod config;
pub mod manifest;
pub mod presets;
pub mod run;

use std::path::PathBuf;

use clap::Parser;
use thiserror::Error;

pub use config::{Command, EngineFlag, RunConfig, SCHEMA_VERSION};
pub use manifest::{Manifest, OutputRecord};
pub use run::{execute, RunOptions};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("config parse: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Units(#[from] isrs_gn_core::units::UnitsError),
    #[error(transparent)]
    Load(#[from] isrs_gn_core::load::LoadError),
    #[error(transparent)]
    ClosedForm(#[from] isrs_gn_core::closed_form::CfError),
    #[error(transparent)]
    Integral(#[from] isrs_gn_core::integral::IntegralError),
    #[error(transparent)]
    Scenario(#[from] isrs_gn_network::ScenarioError),
    #[error(transparent)]
    Eval(#[from] isrs_gn_network::EvalError),
    #[error(transparent)]
    Ssfm(#[from] isrs_gn_ssfm::SsfmError),
}

impl CliError {
    /// Stable machine-readable error class for scripted callers.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Json(_) => "parse",
            CliError::Units(_) => "units",
            CliError::Load(_) => "load",
            CliError::ClosedForm(_) => "closed_form",
            CliError::Integral(_) => "integral",
            CliError::Scenario(_) => "scenario",
            CliError::Eval(_) => "eval",
            CliError::Ssfm(_) => "ssfm",
        }
    }
}

/// Per-channel NLI and SNR estimation for Raman-tilted WDM links.
#[derive(Debug, Parser)]
#[command(name = "isrs-gn", version)]
pub struct Cli {
    /// JSON run configuration (see presets/ for examples)
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in example configuration; see --list-presets
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Output directory, created if missing
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Engine override: cf | integral | ssfm
    #[arg(long, value_name = "ENGINE")]
    pub engine: Option<String>,
    /// Seed override for randomized commands
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for per-channel scans (falls back to ISRS_GN_THREADS)
    #[arg(long)]
    pub threads: Option<usize>,
    /// List built-in presets and exit
    #[arg(long)]
    pub list_presets: bool,
}

fn resolve_threads(flag: Option<usize>) -> Result<usize, CliError> {
    let n = match flag {
        Some(n) => n,
        None => match std::env::var("ISRS_GN_THREADS") {
            Ok(s) => s.parse().map_err(|_| {
                CliError::Config(format!("ISRS_GN_THREADS must be a positive integer, got {s:?}"))
            })?,
            Err(_) => 1,
        },
    };
    if n == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    Ok(n)
}

pub fn run_cli(cli: Cli) -> Result<(), CliError> {
    if cli.list_presets {
        for name in presets::names() {
            println!("{name}");
        }
        return Ok(());
    }
    let text = match (&cli.config, &cli.preset) {
        (Some(path), None) => std::fs::read_to_string(path)?,
        (None, Some(name)) => presets::lookup(name)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown preset {name:?}; available: {}",
                    presets::names().join(", ")
                ))
            })?
            .to_string(),
        _ => {
            return Err(CliError::Config(
                "exactly one of --config or --preset is required".into(),
            ))
        }
    };
    let config: RunConfig = serde_json::from_str(&text)?;
    let out = cli
        .out
        .ok_or_else(|| CliError::Config("--out <dir> is required".into()))?;
    let engine = cli
        .engine
        .as_deref()
        .map(|s| {
            EngineFlag::parse(s).ok_or_else(|| {
                CliError::Config(format!("unknown engine {s:?}; expected cf, integral, or ssfm"))
            })
        })
        .transpose()?;
    let opts = RunOptions {
        threads: resolve_threads(cli.threads)?,
        engine,
        seed: cli.seed,
    };
    let manifest = execute(config, &opts, &out)?;
    println!(
        "{}",
        serde_json::json!({
            "status": "ok",
            "command": manifest.command,
            "out": out,
            "outputs": manifest.outputs.iter().map(|o| o.file.clone()).collect::<Vec<_>>(),
        })
    );
    Ok(())
}
