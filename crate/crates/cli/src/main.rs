use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use pielm_cli::{parse_seeds, run, sweep, verify, Cli, Command, RunConfig};

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let config = RunConfig::resolve(args.case, args.seed, &args.overrides)?;
            let report = run(&config)?;
            println!(
                "case {} seed {}: relative L2 {:.3e}, rank {}/{}, training {:.3} s",
                report.case.id,
                config.seed,
                report.relative_l2,
                report.diagnostics.rank,
                report.diagnostics.cols,
                report.timings.training_s
            );
            for t in &report.traces {
                println!("  {:<10} relative L2 {:.3e}", t.target, t.relative_l2);
            }
            println!("  report: {}", report.artifacts.report.display());
            Ok(true)
        }
        Command::Sweep(args) => {
            let seeds = parse_seeds(&args.seeds)?;
            let config = RunConfig::resolve(args.case, Some(seeds[0]), &args.overrides)?;
            let summary = sweep(&config, &seeds).context("sweep failed")?;
            for r in &summary.runs {
                match (&r.relative_l2, &r.error) {
                    (Some(l2), _) => println!("seed {:>4}: relative L2 {l2:.3e}", r.seed),
                    (None, Some(e)) => println!("seed {:>4}: FAILED {e}", r.seed),
                    (None, None) => unreachable!(),
                }
            }
            if let Some(median) = summary.median_relative_l2 {
                println!(
                    "median {median:.3e}, total training {:.3} s",
                    summary.total_training_s
                );
            }
            Ok(summary.failures == 0)
        }
        Command::Verify(args) => {
            let cases: Vec<u8> = match args.case {
                Some(id) => vec![id],
                None => (1..=4).collect(),
            };
            let outcomes = verify(&cases)?;
            for o in &outcomes {
                let tag = if o.passed { "ok  " } else { "FAIL" };
                println!("{tag} {}: {}", o.name, o.detail);
            }
            Ok(outcomes.iter().all(|o| o.passed))
        }
    }
}
