//! Median relative L2 error over seeds 1..=5 for each benchmark.
//!
//! `cargo run --release -p pielm-core --example accuracy [case ...]`

use std::time::Instant;

use pielm::{case_by_id, robustness_trial, CaseOptions, Config};

fn main() -> pielm::Result<()> {
    let ids: Vec<u8> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let ids = if ids.is_empty() {
        vec![1, 2, 3, 4]
    } else {
        ids
    };
    for id in ids {
        let case = case_by_id(id, CaseOptions::default())?;
        let mut config = Config::for_case(&case);
        if case.spatial_dim() == 2 {
            config.grid = 40;
        }
        let start = Instant::now();
        let stats = robustness_trial(&case, &[1, 2, 3, 4, 5], &config)?;
        println!(
            "case {id}: min {:.3e} median {:.3e} max {:.3e} failures {} ({:.2?})",
            stats.min.unwrap_or(f64::NAN),
            stats.median.unwrap_or(f64::NAN),
            stats.max.unwrap_or(f64::NAN),
            stats.failures,
            start.elapsed()
        );
        for o in &stats.outcomes {
            println!("  seed {} -> {:?} in {:.2?}", o.seed, o.result, o.wall_time);
        }
    }
    Ok(())
}
