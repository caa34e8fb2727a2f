//! End-to-end runs of the `pielm` binary.

use std::path::Path;
use std::process::{Command, Output};

use pielm_cli::{RunReport, SweepSummary};

fn pielm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pielm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> Output {
    let out = pielm(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn report(dir: &Path) -> RunReport {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let rows = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn case1_report_matches_its_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run_ok(&["run", "--case", "1", "--seed", "7", "--out", out]);
    let rep = report(dir.path());
    assert!(rep.relative_l2 <= 1e-8, "L2 {}", rep.relative_l2);
    assert_eq!(rep.config.neurons, 150);
    assert_eq!(rep.diagnostics.cols, 150);
    assert!(rep.timings.training_s < 1.27);

    let (header, rows) = read_csv(&dir.path().join("solution_grid.csv"));
    assert_eq!(
        header,
        ["x", "t", "field", "exact", "predicted", "abs_error"]
    );
    let (mut num2, mut den2) = (0.0f64, 0.0f64);
    for r in &rows {
        let (e, p, a) = (num(&r[3]), num(&r[4]), num(&r[5]));
        assert_eq!(a, (e - p).abs());
        assert!(r[3].contains('e'));
        num2 += (e - p) * (e - p);
        den2 += e * e;
    }
    let recomputed: f64 = num2.sqrt() / den2.sqrt();
    assert!((recomputed - rep.relative_l2).abs() <= 1e-12 * rep.relative_l2);

    let (header, rows) = read_csv(&dir.path().join("boundary_traces.csv"));
    assert_eq!(
        header,
        ["target", "coord", "t", "exact", "predicted", "abs_error"]
    );
    assert_eq!(rows.len(), 2 * 101);
    assert!(rows
        .iter()
        .filter(|r| r[0] == "u_x(0,t)")
        .all(|r| num(&r[3]) == 2.0));

    let (header, rows) = read_csv(&dir.path().join("residuals.csv"));
    assert_eq!(header, ["label", "row_count", "residual_norm"]);
    let labels: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(
        labels,
        ["pde", "initial", "interface.dirichlet", "interface.neumann"]
    );
    let total: usize = rows.iter().map(|r| r[1].parse::<usize>().unwrap()).sum();
    assert_eq!(total, rep.diagnostics.rows);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        run_ok(&[
            "run",
            "--case",
            "2",
            "--seed",
            "3",
            "--grid",
            "30",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
    }
    for file in ["solution_grid.csv", "boundary_traces.csv", "residuals.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(x == y, "{file} differs");
    }
    let (ra, rb) = (report(a.path()), report(b.path()));
    assert_eq!(ra.relative_l2, rb.relative_l2);
}

#[test]
fn case4_uses_two_blocks_of_200() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "run",
        "--case",
        "4",
        "--nc",
        "300",
        "--ni",
        "60",
        "--grid",
        "6",
        "--trace-points",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let rep = report(dir.path());
    assert_eq!(rep.diagnostics.cols, 400);
    assert_eq!(rep.relative_l2_per_field.len(), 2);
    let (header, rows) = read_csv(&dir.path().join("solution_grid.csv"));
    assert_eq!(
        header,
        ["x", "y", "t", "field", "exact", "predicted", "abs_error"]
    );
    assert!(rows.iter().any(|r| r[3] == "1"));
}

#[test]
fn config_file_is_resolved_and_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let out = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            "[run]\ncase = 1\nseed = 4\nout = {:?}\n[model]\nM = 60\n[sampling]\nni = 20\n[evaluation]\ngrid = 12\n",
            out
        ),
    )
    .unwrap();
    run_ok(&["run", "--config", cfg.to_str().unwrap(), "--ni", "30"]);
    let rep = report(&out);
    assert_eq!(rep.config.case, 1);
    assert_eq!(rep.config.seed, 4);
    assert_eq!(rep.config.neurons, 60);
    assert_eq!(rep.config.ni, 30);
    assert_eq!(rep.config.nc, 100);
    assert_eq!(rep.config.grid, 12);
    assert_eq!(rep.diagnostics.cols, 60);
}

#[test]
fn sweep_summary_matches_seed_reports() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "sweep",
        "--case",
        "1",
        "--seeds",
        "1..3",
        "--grid",
        "20",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let summary: SweepSummary = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("sweep_summary.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(summary.seeds, [1, 2, 3]);
    assert_eq!(summary.failures, 0);
    let mut values: Vec<f64> = (1..=3)
        .map(|s| report(&dir.path().join(format!("seed_{s}"))).relative_l2)
        .collect();
    for (entry, v) in summary.runs.iter().zip(&values) {
        assert_eq!(entry.relative_l2, Some(*v));
    }
    values.sort_by(f64::total_cmp);
    assert_eq!(summary.min_relative_l2, Some(values[0]));
    assert_eq!(summary.median_relative_l2, Some(values[1]));
    assert_eq!(summary.max_relative_l2, Some(values[2]));
}

#[test]
fn bad_invocations_fail() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(
        !pielm(&["sweep", "--case", "1", "--seeds", "3..1", "--out", out])
            .status
            .success()
    );
    assert!(
        !pielm(&["sweep", "--case", "1", "--seeds", "", "--out", out])
            .status
            .success()
    );
    assert!(!pielm(&["run", "--case", "5", "--out", out])
        .status
        .success());
    assert!(!pielm(&["run", "--out", out]).status.success());
    assert!(
        !pielm(&["run", "--case", "1", "--row-scale", "bogus=2", "--out", out])
            .status
            .success()
    );
    assert!(!pielm(&["verify"]).status.success());
}

#[test]
fn verify_passes_for_every_case() {
    let out = run_ok(&["verify", "--case", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ok   case 3 consistency"));
    let out = run_ok(&["verify", "--all"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 6);
    assert!(!text.contains("FAIL"));
}
