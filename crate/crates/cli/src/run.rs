//! One end-to-end run and its artifacts.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use pielm::cases::CONSISTENCY_TOLERANCE;
use pielm::evaluation::{ErrorGrid, TraceEvaluation};
use pielm::{boundary_trace, evaluate_field, solve_case, verify_case_consistency};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const REPORT_FILE: &str = "report.json";
pub const GRID_FILE: &str = "solution_grid.csv";
pub const TRACE_FILE: &str = "boundary_traces.csv";
pub const RESIDUAL_FILE: &str = "residuals.csv";

/// Samples per law used by the pre-solve consistency check.
const CONSISTENCY_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub id: u8,
    pub name: String,
    pub field_count: usize,
    pub input_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub sigma_max: f64,
    pub sigma_min_kept: f64,
    pub rcond_used: f64,
    pub residual_norm: f64,
    pub consistency_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub target: String,
    pub samples: usize,
    pub relative_l2: f64,
    pub max_abs_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub label: String,
    pub row_count: usize,
    pub residual_norm: f64,
}

/// Wall-clock seconds per phase. `training_s` is assembly plus solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub assembly_s: f64,
    pub solve_s: f64,
    pub training_s: f64,
    pub evaluation_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub report: PathBuf,
    pub solution_grid: PathBuf,
    pub boundary_traces: PathBuf,
    pub residuals: PathBuf,
}

impl Artifacts {
    fn in_dir(dir: &Path) -> Self {
        Self {
            report: dir.join(REPORT_FILE),
            solution_grid: dir.join(GRID_FILE),
            boundary_traces: dir.join(TRACE_FILE),
            residuals: dir.join(RESIDUAL_FILE),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub case: CaseSummary,
    pub diagnostics: Diagnostics,
    /// Over all test-grid samples of every field.
    pub relative_l2: f64,
    pub relative_l2_per_field: Vec<f64>,
    pub traces: Vec<TraceSummary>,
    pub residuals: Vec<ResidualSummary>,
    pub timings: Timings,
    pub artifacts: Artifacts,
}

/// Solves, evaluates and writes all artifacts into `config.out`.
pub fn run(config: &RunConfig) -> anyhow::Result<RunReport> {
    let case = config.case_definition()?;
    let consistency_residual = verify_case_consistency(&case, CONSISTENCY_SAMPLES)
        .context("case definition failed its consistency check")?;
    let solver = config.solver_config();
    let solution = solve_case(&case, &solver, config.seed).context("solve failed")?;

    let eval_start = Instant::now();
    let evaluation = evaluate_field(&case, &solution.basis, &solution.theta, config.grid)?;
    let traces = case
        .targets
        .iter()
        .map(|t| {
            boundary_trace(
                &case,
                &solution.basis,
                &solution.theta,
                &t.name,
                config.trace_points,
            )
        })
        .collect::<pielm::Result<Vec<_>>>()?;
    let evaluation_s = eval_start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&config.out)
        .with_context(|| format!("creating {}", config.out.display()))?;
    let artifacts = Artifacts::in_dir(&config.out);
    write_grid(&artifacts.solution_grid, &evaluation.grids)?;
    write_traces(&artifacts.boundary_traces, &traces)?;

    let residuals: Vec<ResidualSummary> = solution
        .residual
        .per_label
        .iter()
        .map(|l| ResidualSummary {
            label: l.label.clone(),
            row_count: l.rows,
            residual_norm: l.norm,
        })
        .collect();
    write_residuals(&artifacts.residuals, &residuals)?;

    let diag = &solution.diagnostics;
    let report = RunReport {
        config: config.clone(),
        case: CaseSummary {
            id: case.id,
            name: case.name.to_string(),
            field_count: case.field_count(),
            input_dim: case.input_dim(),
        },
        diagnostics: Diagnostics {
            rows: solution.rows,
            cols: solution.theta.len(),
            rank: diag.rank,
            sigma_max: diag.sigma_max,
            sigma_min_kept: diag.sigma_min_kept,
            rcond_used: diag.rcond_used,
            residual_norm: diag.residual_norm,
            consistency_residual,
        },
        relative_l2: evaluation.aggregate,
        relative_l2_per_field: evaluation.per_field.clone(),
        traces: traces
            .iter()
            .map(|t| TraceSummary {
                target: t.target.clone(),
                samples: t.rows.len(),
                relative_l2: t.relative_l2,
                max_abs_error: t.rows.iter().map(|r| r.abs_error).fold(0.0, f64::max),
            })
            .collect(),
        residuals,
        timings: Timings {
            assembly_s: solution.assembly_time.as_secs_f64(),
            solve_s: diag.solve_time.as_secs_f64(),
            training_s: solution.training_time().as_secs_f64(),
            evaluation_s,
        },
        artifacts,
    };
    let file = File::create(&report.artifacts.report)?;
    serde_json::to_writer_pretty(BufWriter::new(file), &report)?;
    debug_assert!(consistency_residual <= CONSISTENCY_TOLERANCE);
    Ok(report)
}

/// Shortest representation that parses back to the same `f64`.
fn sci(v: f64) -> String {
    format!("{v:e}")
}

fn csv_writer(path: &Path) -> anyhow::Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn write_grid(path: &Path, grids: &[ErrorGrid<f64>]) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    let dim = grids.first().map_or(2, |g| g.dim);
    let mut header = vec!["x"];
    if dim == 3 {
        header.push("y");
    }
    header.extend(["t", "field", "exact", "predicted", "abs_error"]);
    w.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for g in grids {
        for i in 0..g.len() {
            record.clear();
            record.extend(g.point(i).iter().map(|&c| sci(c)));
            record.push(g.field.to_string());
            record.extend([g.exact[i], g.predicted[i], g.abs_error[i]].map(sci));
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_traces(path: &Path, traces: &[TraceEvaluation<f64>]) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["target", "coord", "t", "exact", "predicted", "abs_error"])?;
    for trace in traces {
        for r in &trace.rows {
            w.write_record([
                trace.target.clone(),
                sci(r.coord),
                sci(r.t),
                sci(r.exact),
                sci(r.predicted),
                sci(r.abs_error),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_residuals(path: &Path, rows: &[ResidualSummary]) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["label", "row_count", "residual_norm"])?;
    for r in rows {
        w.write_record([
            r.label.clone(),
            r.row_count.to_string(),
            sci(r.residual_norm),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::sci;

    #[test]
    fn scientific_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            let s = sci(v);
            assert!(s.contains('e'));
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }
}
