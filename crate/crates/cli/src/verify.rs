//! Oracle checks that need no solve.

use pielm::derivative_check::check_feature_derivatives;
use pielm::{case_by_id, verify_case_consistency, Case, CaseOptions};

pub const DERIVATIVE_PROBES: usize = 200;
pub const DERIVATIVE_SEED: u64 = 0x5eed;
const CONSISTENCY_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn consistency(case: &Case, name: String) -> VerifyOutcome {
    match verify_case_consistency(case, CONSISTENCY_SAMPLES) {
        Ok(max) => VerifyOutcome {
            name,
            passed: true,
            detail: format!("max residual {max:.3e}"),
        },
        Err(e) => VerifyOutcome {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

/// Consistency of each case (with and without the optional case-1 law),
/// then the finite-difference derivative suite.
pub fn verify(cases: &[u8]) -> anyhow::Result<Vec<VerifyOutcome>> {
    let mut out = Vec::new();
    for &id in cases {
        let case = case_by_id::<f64>(id, CaseOptions::default())?;
        out.push(consistency(&case, format!("case {id} consistency")));
        if id == 1 {
            let with_flux = case_by_id::<f64>(
                1,
                CaseOptions {
                    include_fixed_neumann: true,
                },
            )?;
            out.push(consistency(
                &with_flux,
                "case 1 consistency (fixed flux)".into(),
            ));
        }
    }
    let fd = check_feature_derivatives(DERIVATIVE_PROBES, DERIVATIVE_SEED)?;
    let detail = match fd.failures.first() {
        None => format!(
            "{} comparisons, worst relative {:.2e}, worst absolute {:.2e}",
            fd.comparisons, fd.worst_relative, fd.worst_absolute
        ),
        Some(f) => format!(
            "probe {} neuron {} order {:?} at {:?}: analytic {:e} vs numeric {:e}",
            f.probe, f.neuron, f.order, f.point, f.analytic, f.numeric
        ),
    };
    out.push(VerifyOutcome {
        name: "feature derivatives".into(),
        passed: fd.passed(),
        detail,
    });
    Ok(out)
}
