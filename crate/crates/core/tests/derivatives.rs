//! Closed-form feature derivatives against finite differences.

use pielm::basis::{DerivOrder, ElmBasis};
use pielm::derivative_check::{check_feature_derivatives, numeric_feature_derivs};

#[test]
fn two_hundred_random_probes() {
    let report = check_feature_derivatives(200, 0x5eed).unwrap();
    assert_eq!(report.probes, 200);
    assert!(
        report.passed(),
        "first failure: {:?}",
        report.failures.first()
    );
}

#[test]
fn other_seeds_pass_too() {
    for seed in [1, 2, 3] {
        assert!(check_feature_derivatives(50, seed).unwrap().passed());
    }
}

#[test]
fn time_derivative_example() {
    // w = (0.3, 0.7), b = 0.1 at (1, 2): z = 1.8.
    let basis =
        ElmBasis::from_parts(nalgebra::dmatrix![0.3, 0.7], nalgebra::dvector![0.1]).unwrap();
    let analytic = basis
        .eval_feature_derivs(&[1.0, 2.0], DerivOrder::dt(2))
        .unwrap()[0];
    let numeric = numeric_feature_derivs(&basis, &[1.0, 2.0], DerivOrder::dt(2)).unwrap()[0];
    assert!((analytic - 0.072_490_861_83).abs() < 1e-10);
    assert!((analytic - numeric).abs() < 1e-10);
}
