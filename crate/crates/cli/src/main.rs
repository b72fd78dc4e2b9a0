mod commands;
mod config;
mod error;
mod metadata;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{check_inputs, DirLock, Step};
use config::{RunConfig, Settings};
use error::CliError;

/// Community sentiment and engagement index pipeline.
#[derive(Debug, Parser)]
#[command(name = "csei", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML config; keys match the long flag names
    #[arg(long, short = 'c', global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: Settings,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and filter posts into clean_posts.csv
    Ingest(Common),
    /// Score, aggregate, remove outliers, weight and build the index
    Build(Common),
    /// Deltas, smoothing, extrema, event statistics and correlations
    Analyze(Common),
    /// ingest, build and analyze in one go
    Run(Common),
    /// Check the configuration and print it fully resolved
    ValidateConfig(Common),
}

fn resolve(common: &Common) -> Result<RunConfig, CliError> {
    let file = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|_| CliError::MissingInput {
                key: "config",
                path: path.clone(),
            })?;
            Settings::from_toml(&text, path)?
        }
        None => Settings::default(),
    };
    RunConfig::resolve(&file.overlaid(&common.settings))
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (common, steps): (&Common, &[Step]) = match &cli.command {
        Command::Ingest(c) => (c, &[Step::Ingest]),
        Command::Build(c) => (c, &[Step::Build]),
        Command::Analyze(c) => (c, &[Step::Analyze]),
        Command::Run(c) => (c, &[Step::Ingest, Step::Build, Step::Analyze]),
        Command::ValidateConfig(c) => {
            let cfg = resolve(c)?;
            print!("{}", cfg.to_toml());
            return Ok(());
        }
    };
    let cfg = resolve(common)?;
    check_inputs(&cfg, steps)?;
    let _lock = DirLock::acquire(&cfg.out)?;
    for step in steps {
        match step {
            Step::Ingest => commands::ingest(&cfg)?,
            Step::Build => commands::build(&cfg)?,
            Step::Analyze => commands::analyze_step(&cfg)?,
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
