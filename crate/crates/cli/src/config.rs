//! Run configuration: built-in defaults, then the TOML file, then flags.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use pielm::geometry::SamplingStrategy;
use pielm::pipeline::DEFAULT_GRID;
use pielm::{case_by_id, Case, CaseOptions, Config};
use serde::{Deserialize, Serialize};

pub const DEFAULT_OUT: &str = "pielm-out";
pub const DEFAULT_TRACE_POINTS: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    Random,
    Grid,
}

impl From<Sampling> for SamplingStrategy {
    fn from(s: Sampling) -> Self {
        match s {
            Sampling::Random => SamplingStrategy::Random,
            Sampling::Grid => SamplingStrategy::Grid,
        }
    }
}

/// Layout of the optional config file.
///
/// ```toml
/// [run]
/// case = 1
/// seed = 7
/// out = "results"
///
/// [model]
/// M = 150
/// weight_lo = -1.0
/// weight_hi = 1.0
/// normalize_inputs = false
///
/// [sampling]
/// nc = 100
/// ni = 50
/// strategy = "random"
/// include_fixed_neumann = false
///
/// [solver]
/// rcond = 1e-15
///
/// [evaluation]
/// grid = 100
/// trace_points = 101
///
/// [row_scale]
/// pde = 1.0
/// ```
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub evaluation: EvaluationSection,
    #[serde(default)]
    pub row_scale: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub case: Option<u8>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(rename = "M", alias = "neurons")]
    pub neurons: Option<usize>,
    pub weight_lo: Option<f64>,
    pub weight_hi: Option<f64>,
    pub normalize_inputs: Option<bool>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    pub nc: Option<usize>,
    pub ni: Option<usize>,
    pub strategy: Option<Sampling>,
    pub include_fixed_neumann: Option<bool>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub rcond: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationSection {
    pub grid: Option<usize>,
    pub trace_points: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Flags shared by `run` and `sweep`; each mirrors a config-file key.
#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// TOML config file; flags take precedence over its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Hidden neurons.
    #[arg(long = "M", alias = "neurons")]
    pub neurons: Option<usize>,
    /// Collocation points per PDE and interface law.
    #[arg(long)]
    pub nc: Option<usize>,
    /// Points per time slice and per fixed-boundary face.
    #[arg(long)]
    pub ni: Option<usize>,
    /// Relative singular-value cutoff.
    #[arg(long)]
    pub rcond: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub weight_lo: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub weight_hi: Option<f64>,
    #[arg(long)]
    pub normalize_inputs: bool,
    #[arg(long, value_enum)]
    pub sampling: Option<Sampling>,
    /// Adds the fixed-boundary flux law to case 1.
    #[arg(long)]
    pub include_fixed_neumann: bool,
    /// Test-grid nodes per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Trace samples per axis.
    #[arg(long)]
    pub trace_points: Option<usize>,
    /// Row multiplier, `LABEL=VALUE`; may be repeated.
    #[arg(long = "row-scale", value_parser = parse_row_scale)]
    pub row_scale: Vec<(String, f64)>,
}

fn parse_row_scale(s: &str) -> Result<(String, f64), String> {
    let (label, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected LABEL=VALUE, got {s:?}"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("{value:?}: {e}"))?;
    Ok((label.trim().to_string(), value))
}

/// Fully resolved settings, echoed verbatim into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub case: u8,
    pub seed: u64,
    pub neurons: usize,
    pub nc: usize,
    pub ni: usize,
    pub rcond: f64,
    pub weight_lo: f64,
    pub weight_hi: f64,
    pub normalize_inputs: bool,
    pub sampling: Sampling,
    pub include_fixed_neumann: bool,
    pub grid: usize,
    pub trace_points: usize,
    pub row_scale: BTreeMap<String, f64>,
    pub out: PathBuf,
}

impl RunConfig {
    /// Merges defaults, `file` and `flags`; `case` and `seed` given on the
    /// command line win over the file.
    pub fn resolve(case: Option<u8>, seed: Option<u64>, flags: &Overrides) -> anyhow::Result<Self> {
        let file = match &flags.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let Some(case) = case.or(file.run.case) else {
            bail!("no case given (use --case or [run] case in the config file)");
        };
        let probe = case_by_id::<f64>(case, CaseOptions::default())?;
        let defaults = Config::for_case(&probe);

        let mut row_scale = file.row_scale.clone();
        row_scale.extend(flags.row_scale.iter().cloned());

        let config = Self {
            case,
            seed: seed.or(file.run.seed).unwrap_or(1),
            neurons: flags
                .neurons
                .or(file.model.neurons)
                .unwrap_or(defaults.neurons),
            nc: flags
                .nc
                .or(file.sampling.nc)
                .unwrap_or(defaults.n_collocation),
            ni: flags.ni.or(file.sampling.ni).unwrap_or(defaults.n_initial),
            rcond: flags.rcond.or(file.solver.rcond).unwrap_or(defaults.rcond),
            weight_lo: flags
                .weight_lo
                .or(file.model.weight_lo)
                .unwrap_or(defaults.weight_interval.0),
            weight_hi: flags
                .weight_hi
                .or(file.model.weight_hi)
                .unwrap_or(defaults.weight_interval.1),
            normalize_inputs: flags.normalize_inputs
                || file.model.normalize_inputs.unwrap_or(false),
            sampling: flags
                .sampling
                .or(file.sampling.strategy)
                .unwrap_or(Sampling::Random),
            include_fixed_neumann: flags.include_fixed_neumann
                || file.sampling.include_fixed_neumann.unwrap_or(false),
            grid: flags.grid.or(file.evaluation.grid).unwrap_or(DEFAULT_GRID),
            trace_points: flags
                .trace_points
                .or(file.evaluation.trace_points)
                .unwrap_or(DEFAULT_TRACE_POINTS),
            row_scale,
            out: flags
                .out
                .clone()
                .or(file.run.out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.neurons == 0 || self.nc == 0 || self.ni == 0 {
            bail!("M, nc and ni must be positive");
        }
        if self.grid < 2 || self.trace_points < 2 {
            bail!("grid and trace_points need at least 2 nodes per axis");
        }
        if self
            .weight_lo
            .partial_cmp(&self.weight_hi)
            .is_none_or(Ordering::is_gt)
        {
            bail!(
                "weight interval [{}, {}] is empty",
                self.weight_lo,
                self.weight_hi
            );
        }
        Ok(())
    }

    pub fn case_definition(&self) -> anyhow::Result<Case> {
        let options = CaseOptions {
            include_fixed_neumann: self.include_fixed_neumann,
        };
        Ok(case_by_id(self.case, options)?)
    }

    pub fn solver_config(&self) -> Config {
        Config {
            neurons: self.neurons,
            n_collocation: self.nc,
            n_initial: self.ni,
            rcond: self.rcond,
            weight_interval: (self.weight_lo, self.weight_hi),
            sampling: self.sampling.into(),
            normalize_inputs: self.normalize_inputs,
            row_scales: self
                .row_scale
                .iter()
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            grid: self.grid,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_dimension() {
        let one = RunConfig::resolve(Some(1), None, &Overrides::default()).unwrap();
        assert_eq!((one.neurons, one.nc, one.ni), (150, 100, 50));
        assert_eq!((one.weight_lo, one.weight_hi), (-1.0, 1.0));
        let two = RunConfig::resolve(Some(4), None, &Overrides::default()).unwrap();
        assert_eq!((two.neurons, two.nc, two.ni), (200, 2000, 401));
    }

    #[test]
    fn flags_beat_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(
            &path,
            "[run]\ncase = 2\nseed = 4\n[model]\nM = 40\n[sampling]\nnc = 30\n[row_scale]\npde = 2.0\n",
        )
        .unwrap();
        let flags = Overrides {
            config: Some(path),
            nc: Some(60),
            row_scale: vec![("pde".into(), 3.0)],
            ..Overrides::default()
        };
        let cfg = RunConfig::resolve(None, Some(9), &flags).unwrap();
        assert_eq!(cfg.case, 2);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.neurons, 40);
        assert_eq!(cfg.nc, 60);
        assert_eq!(cfg.row_scale["pde"], 3.0);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[model]\nneuronz = 3\n").unwrap();
        let flags = Overrides {
            config: Some(path),
            ..Overrides::default()
        };
        assert!(RunConfig::resolve(Some(1), None, &flags).is_err());
    }

    #[test]
    fn missing_case_is_an_error() {
        assert!(RunConfig::resolve(None, None, &Overrides::default()).is_err());
        assert!(RunConfig::resolve(Some(7), None, &Overrides::default()).is_err());
    }

    #[test]
    fn row_scale_parser() {
        assert_eq!(parse_row_scale("pde=0.5").unwrap(), ("pde".into(), 0.5));
        assert!(parse_row_scale("pde").is_err());
        assert!(parse_row_scale("pde=x").is_err());
    }
}
