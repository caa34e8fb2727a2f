//! Finite-difference cross-check of the closed-form feature derivatives.
//!
//! First derivatives use a central difference with step `1e-5`. Second
//! derivatives (pure and mixed) use central differences at steps `h` and
//! `h / 2` combined by one Richardson step, which cancels the `O(h^2)` term
//! while keeping the round-off of a `1e-3` step.

use crate::basis::{DerivOrder, ElmBasis};
use crate::error::Result;
use crate::rng::UniformStream;

pub const FIRST_ORDER_STEP: f64 = 1e-5;
pub const SECOND_ORDER_STEP: f64 = 1e-3;
pub const RELATIVE_TOLERANCE: f64 = 1e-6;
/// Below this magnitude the comparison switches to [`ABSOLUTE_TOLERANCE`].
pub const SMALL_VALUE: f64 = 1e-2;
pub const ABSOLUTE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeFailure {
    pub probe: usize,
    pub neuron: usize,
    pub order: Vec<u8>,
    pub point: Vec<f64>,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeCheck {
    pub probes: usize,
    pub comparisons: usize,
    /// Largest relative error among entries judged relatively.
    pub worst_relative: f64,
    /// Largest absolute error among entries below [`SMALL_VALUE`].
    pub worst_absolute: f64,
    pub failures: Vec<ProbeFailure>,
}

impl DerivativeCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn shifted(point: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut p = point.to_vec();
    for &(axis, h) in moves {
        p[axis] += h;
    }
    p
}

fn features(basis: &ElmBasis<f64>, point: &[f64]) -> Result<Vec<f64>> {
    Ok(basis.eval_features(point)?.as_slice().to_vec())
}

fn combine(terms: &[(f64, Vec<f64>)], scale: f64) -> Vec<f64> {
    let n = terms[0].1.len();
    (0..n)
        .map(|m| terms.iter().map(|(c, v)| c * v[m]).sum::<f64>() / scale)
        .collect()
}

fn second_difference(
    basis: &ElmBasis<f64>,
    point: &[f64],
    axes: (usize, usize),
    h: f64,
) -> Result<Vec<f64>> {
    let (i, j) = axes;
    if i == j {
        let terms = [
            (1.0, features(basis, &shifted(point, &[(i, h)]))?),
            (-2.0, features(basis, point)?),
            (1.0, features(basis, &shifted(point, &[(i, -h)]))?),
        ];
        Ok(combine(&terms, h * h))
    } else {
        let terms = [
            (1.0, features(basis, &shifted(point, &[(i, h), (j, h)]))?),
            (-1.0, features(basis, &shifted(point, &[(i, h), (j, -h)]))?),
            (-1.0, features(basis, &shifted(point, &[(i, -h), (j, h)]))?),
            (1.0, features(basis, &shifted(point, &[(i, -h), (j, -h)]))?),
        ];
        Ok(combine(&terms, 4.0 * h * h))
    }
}

/// Numerical derivative of every feature at `point`.
pub fn numeric_feature_derivs(
    basis: &ElmBasis<f64>,
    point: &[f64],
    order: DerivOrder,
) -> Result<Vec<f64>> {
    let axes: Vec<usize> = order
        .orders()
        .iter()
        .enumerate()
        .flat_map(|(axis, &k)| std::iter::repeat_n(axis, k as usize))
        .collect();
    match axes.as_slice() {
        [] => features(basis, point),
        [i] => {
            let h = FIRST_ORDER_STEP;
            let terms = [
                (1.0, features(basis, &shifted(point, &[(*i, h)]))?),
                (-1.0, features(basis, &shifted(point, &[(*i, -h)]))?),
            ];
            Ok(combine(&terms, 2.0 * h))
        }
        [i, j] => {
            let coarse = second_difference(basis, point, (*i, *j), SECOND_ORDER_STEP)?;
            let fine = second_difference(basis, point, (*i, *j), SECOND_ORDER_STEP / 2.0)?;
            Ok(fine
                .iter()
                .zip(&coarse)
                .map(|(f, c)| (4.0 * f - c) / 3.0)
                .collect())
        }
        _ => unreachable!("DerivOrder caps the total order at 2"),
    }
}

/// Runs `probes` random (basis, point, order) comparisons with `1 <= |order| <= 2`.
pub fn check_feature_derivatives(probes: usize, seed: u64) -> Result<DerivativeCheck> {
    let mut rng = UniformStream::new(seed, 1000);
    let mut report = DerivativeCheck {
        probes,
        comparisons: 0,
        worst_relative: 0.0,
        worst_absolute: 0.0,
        failures: Vec::new(),
    };
    for probe in 0..probes {
        let dim = if rng.next_unit() < 0.5 { 2 } else { 3 };
        let neurons = 1 + (rng.next_unit() * 8.0) as usize;
        let basis = ElmBasis::new(dim, neurons, seed.wrapping_add(probe as u64), (-2.0, 2.0))?;
        let point: Vec<f64> = (0..dim).map(|_| rng.next_in(-1.0, 2.0)).collect();
        let mut orders = [0u8; 3];
        let first = (rng.next_unit() * dim as f64) as usize;
        orders[first] += 1;
        if rng.next_unit() < 0.5 {
            orders[(rng.next_unit() * dim as f64) as usize] += 1;
        }
        let order = DerivOrder::new(&orders[..dim])?;

        let analytic = basis.eval_feature_derivs(&point, order)?;
        let numeric = numeric_feature_derivs(&basis, &point, order)?;
        for (neuron, (&a, &n)) in analytic.iter().zip(&numeric).enumerate() {
            report.comparisons += 1;
            let ok = if a.abs() < SMALL_VALUE {
                let err = (a - n).abs();
                report.worst_absolute = report.worst_absolute.max(err);
                err <= ABSOLUTE_TOLERANCE
            } else {
                let err = (a - n).abs() / a.abs();
                report.worst_relative = report.worst_relative.max(err);
                err <= RELATIVE_TOLERANCE
            };
            if !ok {
                report.failures.push(ProbeFailure {
                    probe,
                    neuron,
                    order: order.orders().to_vec(),
                    point: point.clone(),
                    analytic: a,
                    numeric: n,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    #[test]
    fn mixed_difference_matches_closed_form() {
        let basis = ElmBasis::from_parts(dmatrix![0.3, 0.7], dvector![0.1]).unwrap();
        let order = DerivOrder::new(&[1, 1]).unwrap();
        let numeric = numeric_feature_derivs(&basis, &[1.0, 2.0], order).unwrap();
        let z: f64 = 0.3 + 1.4 + 0.1;
        let s = z.tanh();
        let exact = 0.3 * 0.7 * (-2.0 * s * (1.0 - s * s));
        assert!(
            (numeric[0] - exact).abs() < 1e-8,
            "{} vs {exact}",
            numeric[0]
        );
    }

    #[test]
    fn small_suite_passes() {
        let report = check_feature_derivatives(20, 3).unwrap();
        assert!(report.passed(), "{:?}", report.failures.first());
        assert!(report.comparisons >= 20);
    }
}
