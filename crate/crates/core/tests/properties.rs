//! Property tests for the basis, metric, assembly and solver.

use nalgebra::{DMatrix, DVector};
use pielm::basis::{DerivOrder, ElmBasis};
use pielm::constraints::{assemble_system, Coefficient, LinearConstraint, LinearTerm};
use pielm::geometry::CollocationSet;
use pielm::lstsq::{singular_values, DEFAULT_RCOND};
use pielm::{relative_l2, solve_min_norm};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, rows * cols)
        .prop_map(move |v| DMatrix::from_vec(rows, cols, v))
}

fn system() -> impl Strategy<Value = (DMatrix<f64>, DVector<f64>)> {
    (1usize..25, 1usize..15).prop_flat_map(|(m, n)| {
        (
            matrix(m, n),
            prop::collection::vec(-1.0..1.0f64, m).prop_map(DVector::from_vec),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn metric_is_scale_invariant(
        pairs in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..40),
        c in prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64],
    ) {
        let exact: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let pred: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        prop_assume!(exact.iter().any(|&e| e != 0.0));
        let base = relative_l2(&exact, &pred).unwrap();
        let scaled_e: Vec<f64> = exact.iter().map(|e| c * e).collect();
        let scaled_p: Vec<f64> = pred.iter().map(|p| c * p).collect();
        let scaled = relative_l2(&scaled_e, &scaled_p).unwrap();
        prop_assert!(base >= 0.0);
        prop_assert!((scaled - base).abs() <= 1e-12 * base.max(1e-300));
        prop_assert_eq!(relative_l2(&exact, &exact).unwrap(), 0.0);
    }

    #[test]
    fn features_lie_in_open_unit_interval(
        seed in any::<u64>(),
        point in prop::collection::vec(-5.0..5.0f64, 3),
    ) {
        let basis = ElmBasis::new(3, 16, seed, (-1.0, 1.0)).unwrap();
        for h in basis.eval_features(&point).unwrap().iter() {
            prop_assert!(h.abs() < 1.0);
        }
    }

    #[test]
    fn single_axis_derivative_factorizes(
        seed in any::<u64>(),
        point in prop::collection::vec(-2.0..2.0f64, 2),
        axis in 0usize..2,
        order in 1u8..=2,
    ) {
        let basis = ElmBasis::new(2, 8, seed, (-1.0, 1.0)).unwrap();
        let d = basis.eval_feature_derivs(&point, DerivOrder::along(2, axis, order)).unwrap();
        for m in 0..8 {
            let w = basis.weights().row(m);
            let z = w[0] * point[0] + w[1] * point[1] + basis.biases()[m];
            let s = z.tanh();
            let sigma = if order == 1 { 1.0 - s * s } else { -2.0 * s * (1.0 - s * s) };
            let expected = w[axis].powi(order as i32) * sigma;
            prop_assert!((d[m] - expected).abs() <= 1e-15 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn scaling_a_constraint_scales_its_rows(
        seed in any::<u64>(),
        coords in prop::collection::vec(-1.0..1.0f64, 2..20),
        c in -5.0..5.0f64,
    ) {
        let coords = coords[..coords.len() / 2 * 2].to_vec();
        let points = CollocationSet::new("p", 2, coords).unwrap();
        let basis = ElmBasis::new(2, 6, seed, (-1.0, 1.0)).unwrap();
        let build = |k: f64| {
            LinearConstraint::new(
                "law",
                vec![
                    LinearTerm::constant(0, DerivOrder::dt(2), k),
                    LinearTerm::constant(0, DerivOrder::dxx(2), -2.0 * k),
                ],
                Coefficient::func(move |p: &[f64]| k * (p[0] + p[1].sin())),
                points.clone(),
            )
            .unwrap()
        };
        let one = assemble_system(&basis, &[build(1.0)], 1).unwrap();
        let many = assemble_system(&basis, &[build(c)], 1).unwrap();
        prop_assert!((&many.matrix - &one.matrix * c).abs().max() <= 1e-14 * (1.0 + c.abs()));
        prop_assert!((&many.rhs - &one.rhs * c).abs().max() <= 1e-14 * (1.0 + c.abs()));
    }

    #[test]
    fn solution_is_optimal_against_perturbations(
        (a, r) in system(),
        perturb in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 15), 10),
    ) {
        let (theta, diag) = solve_min_norm(&a, &r, DEFAULT_RCOND).unwrap();
        let best = (&a * &theta - &r).norm();
        prop_assert!((best - diag.residual_norm).abs() <= 1e-12 * (1.0 + best));
        for p in perturb {
            let t = &theta + DVector::from_iterator(a.ncols(), p.into_iter().take(a.ncols()));
            prop_assert!(best <= (&a * &t - &r).norm() + 1e-12 * r.norm());
        }
    }

    #[test]
    fn normal_residual_is_small((a, r) in system()) {
        let (theta, diag) = solve_min_norm(&a, &r, DEFAULT_RCOND).unwrap();
        let sigma_max = singular_values(&a).unwrap()[0];
        prop_assert!(diag.rank <= a.nrows().min(a.ncols()));
        prop_assert!((a.transpose() * (&a * &theta - &r)).norm() <= 1e-8 * sigma_max * r.norm());
    }

    #[test]
    fn consistent_tall_systems_are_recovered(
        a in (1usize..12).prop_flat_map(|n| matrix(n + 8, n)),
        seed in any::<u64>(),
    ) {
        let mut rng = pielm::rng::UniformStream::new(seed, 0);
        let truth = DVector::from_fn(a.ncols(), |_, _| rng.next_in(-1.0, 1.0));
        let r = &a * &truth;
        let (theta, _) = solve_min_norm(&a, &r, DEFAULT_RCOND).unwrap();
        prop_assert!((&a * &theta - &r).norm() <= 1e-10 * r.norm());
    }
}
