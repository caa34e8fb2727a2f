//! Command-line front end: configuration, runs, seed sweeps and oracle checks.

pub mod config;
pub mod run;
pub mod sweep;
pub mod verify;

use clap::{Args, Parser, Subcommand};

pub use config::{Overrides, RunConfig};
pub use run::{run, RunReport};
pub use sweep::{parse_seeds, sweep, SweepSummary};
pub use verify::verify;

#[derive(Debug, Parser)]
#[command(
    name = "pielm",
    version,
    about = "Physics-informed ELM for inverse Stefan problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one case for one seed and write the report and CSVs.
    Run(RunArgs),
    /// Repeat `run` over a seed range.
    Sweep(SweepArgs),
    /// Check the case definitions and feature derivatives.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub case: Option<u8>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub case: Option<u8>,
    /// `a..b` (inclusive) or a comma-separated list.
    #[arg(long)]
    pub seeds: String,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub case: Option<u8>,
    #[arg(long)]
    pub all: bool,
}
