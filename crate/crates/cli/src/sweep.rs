//! Repeated runs over a seed range.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Duration;

use anyhow::{bail, Context};
use pielm::evaluation::SeedOutcome;
use pielm::Stats;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::run::run;

pub const SUMMARY_FILE: &str = "sweep_summary.json";

/// Parses `a..b` (inclusive), `a..=b`, a comma list or a single seed.
pub fn parse_seeds(spec: &str) -> anyhow::Result<Vec<u64>> {
    let spec = spec.trim();
    let seeds: Vec<u64> = if let Some((a, b)) = spec.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let lo: u64 = a
            .trim()
            .parse()
            .with_context(|| format!("bad seed range {spec:?}"))?;
        let hi: u64 = b
            .trim()
            .parse()
            .with_context(|| format!("bad seed range {spec:?}"))?;
        (lo..=hi).collect()
    } else {
        spec.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().with_context(|| format!("bad seed {s:?}")))
            .collect::<anyhow::Result<_>>()?
    };
    if seeds.is_empty() {
        bail!("seed list {spec:?} is empty");
    }
    Ok(seeds)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub seed: u64,
    pub relative_l2: Option<f64>,
    pub training_s: Option<f64>,
    pub report: Option<PathBuf>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub case: u8,
    pub seeds: Vec<u64>,
    pub runs: Vec<SeedEntry>,
    pub min_relative_l2: Option<f64>,
    pub median_relative_l2: Option<f64>,
    pub max_relative_l2: Option<f64>,
    pub spread_ratio: Option<f64>,
    pub failures: usize,
    pub total_training_s: f64,
}

/// Runs every seed into `<out>/seed_<n>/` and writes the summary to `<out>`.
/// Failed seeds are recorded rather than aborting the sweep.
pub fn sweep(base: &RunConfig, seeds: &[u64]) -> anyhow::Result<SweepSummary> {
    if seeds.is_empty() {
        bail!("seed list is empty");
    }
    std::fs::create_dir_all(&base.out)?;
    let mut runs = Vec::with_capacity(seeds.len());
    let mut outcomes = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let config = RunConfig {
            seed,
            out: base.out.join(format!("seed_{seed}")),
            ..base.clone()
        };
        let entry = match run(&config) {
            Ok(report) => SeedEntry {
                seed,
                relative_l2: Some(report.relative_l2),
                training_s: Some(report.timings.training_s),
                report: Some(report.artifacts.report),
                error: None,
            },
            Err(e) => SeedEntry {
                seed,
                relative_l2: None,
                training_s: None,
                report: None,
                error: Some(format!("{e:#}")),
            },
        };
        outcomes.push(SeedOutcome {
            seed,
            result: entry
                .relative_l2
                .ok_or_else(|| entry.error.clone().unwrap_or_default()),
            wall_time: Duration::from_secs_f64(entry.training_s.unwrap_or(0.0)),
        });
        runs.push(entry);
    }
    let stats = Stats::from_outcomes(outcomes);
    let summary = SweepSummary {
        case: base.case,
        seeds: seeds.to_vec(),
        total_training_s: runs.iter().filter_map(|r| r.training_s).sum(),
        runs,
        min_relative_l2: stats.min,
        median_relative_l2: stats.median,
        max_relative_l2: stats.max,
        spread_ratio: stats.spread_ratio(),
        failures: stats.failures,
    };
    let file = File::create(base.out.join(SUMMARY_FILE))?;
    serde_json::to_writer_pretty(BufWriter::new(file), &summary)?;
    Ok(summary)
}
