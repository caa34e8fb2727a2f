//! Accuracy metrics against the closed-form solutions.

use std::time::Duration;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::basis::{DerivOrder, ElmBasis};
use crate::cases::{in_field_region, CaseDefinition};
use crate::error::{Error, Result};
use crate::geometry::Face;
use crate::pipeline::{field_block, solve_case, PielmConfig};
use crate::Scalar;

/// `||exact - predicted||_2 / ||exact||_2`.
pub fn relative_l2<T: Scalar>(exact: &[T], predicted: &[T]) -> Result<T> {
    if exact.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            expected: exact.len(),
            got: predicted.len(),
        });
    }
    if exact.is_empty() {
        return Err(Error::EmptyGrid("no samples".into()));
    }
    let (num, den) = exact
        .iter()
        .zip(predicted)
        .fold((T::zero(), T::zero()), |(num, den), (&e, &p)| {
            (num + (e - p) * (e - p), den + e * e)
        });
    if den == T::zero() {
        return Err(Error::ZeroNorm);
    }
    Ok(num.sqrt() / den.sqrt())
}

/// Exact and predicted values of one field on a set of points.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorGrid<T> {
    pub field: usize,
    pub dim: usize,
    /// Flat, `dim` coordinates per point.
    pub points: Vec<T>,
    pub exact: Vec<T>,
    pub predicted: Vec<T>,
    pub abs_error: Vec<T>,
}

impl<T: Scalar> ErrorGrid<T> {
    pub fn from_values(
        field: usize,
        dim: usize,
        points: Vec<T>,
        exact: Vec<T>,
        predicted: Vec<T>,
    ) -> Self {
        let abs_error = exact
            .iter()
            .zip(&predicted)
            .map(|(&e, &p)| (e - p).abs())
            .collect();
        Self {
            field,
            dim,
            points,
            exact,
            predicted,
            abs_error,
        }
    }

    pub fn len(&self) -> usize {
        self.exact.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exact.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn relative_l2(&self) -> Result<T> {
        relative_l2(&self.exact, &self.predicted)
    }

    pub fn max_abs_error(&self) -> T {
        self.abs_error.iter().copied().fold(T::zero(), T::max)
    }
}

#[derive(Clone, Debug)]
pub struct FieldEvaluation<T> {
    pub grids: Vec<ErrorGrid<T>>,
    pub per_field: Vec<T>,
    /// Relative L2 over all fields' samples concatenated.
    pub aggregate: T,
}

fn check_theta<T: Scalar>(
    case: &CaseDefinition<T>,
    basis: &ElmBasis<T>,
    theta: &DVector<T>,
) -> Result<()> {
    let expected = case.field_count() * basis.neurons();
    if theta.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: theta.len(),
        });
    }
    Ok(())
}

/// Points of the uniform tensor grid (`n` nodes per axis, endpoints
/// included, `t` slowest and `x` fastest) inside the closure of `field`'s phase.
pub fn field_grid_points<T: Scalar>(case: &CaseDefinition<T>, field: usize, n: usize) -> Vec<T> {
    let domain = case.geometry.domain();
    let xs = domain.x().linspace(n);
    let ys = domain.y().map(|y| y.linspace(n));
    let ts = domain.t().linspace(n);
    let mut out = Vec::new();
    let mut p = Vec::with_capacity(3);
    for &t in &ts {
        let y_levels: &[T] = ys.as_deref().unwrap_or(&[]);
        let y_iter: Box<dyn Iterator<Item = Option<T>>> = if ys.is_some() {
            Box::new(y_levels.iter().map(|&y| Some(y)))
        } else {
            Box::new(std::iter::once(None))
        };
        for y in y_iter {
            for &x in &xs {
                p.clear();
                p.push(x);
                p.extend(y);
                p.push(t);
                if in_field_region(case, field, &p) {
                    out.extend_from_slice(&p);
                }
            }
        }
    }
    out
}

fn predict_all<T: Scalar>(
    basis: &ElmBasis<T>,
    weights: &[T],
    order: DerivOrder,
    points: &[T],
    dim: usize,
) -> Result<Vec<T>> {
    points
        .par_chunks(dim)
        .map(|p| basis.predict(p, order, weights))
        .collect()
}

/// Compares the network prediction with the exact fields on the test grid.
pub fn evaluate_field<T: Scalar>(
    case: &CaseDefinition<T>,
    basis: &ElmBasis<T>,
    theta: &DVector<T>,
    grid: usize,
) -> Result<FieldEvaluation<T>> {
    check_theta(case, basis, theta)?;
    let dim = case.input_dim();
    let mut grids = Vec::with_capacity(case.field_count());
    for field in 0..case.field_count() {
        let points = field_grid_points(case, field, grid);
        if points.is_empty() {
            return Err(Error::EmptyGrid(format!(
                "field {field} at resolution {grid}"
            )));
        }
        let zero = DerivOrder::zero(dim);
        let exact: Vec<T> = points
            .chunks(dim)
            .map(|p| case.exact_derivative(field, zero, p))
            .collect();
        let predicted = predict_all(
            basis,
            field_block(theta, basis.neurons(), field),
            zero,
            &points,
            dim,
        )?;
        grids.push(ErrorGrid::from_values(field, dim, points, exact, predicted));
    }
    let per_field = grids
        .iter()
        .map(ErrorGrid::relative_l2)
        .collect::<Result<Vec<_>>>()?;
    let all_exact: Vec<T> = grids.iter().flat_map(|g| g.exact.iter().copied()).collect();
    let all_pred: Vec<T> = grids
        .iter()
        .flat_map(|g| g.predicted.iter().copied())
        .collect();
    let aggregate = relative_l2(&all_exact, &all_pred)?;
    Ok(FieldEvaluation {
        grids,
        per_field,
        aggregate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow<T> {
    /// Free spatial coordinate along the face (`y` on `x` faces and `x` on
    /// `y` faces in 2D); in 1D the face's `x` position.
    pub coord: T,
    pub t: T,
    pub exact: T,
    pub predicted: T,
    pub abs_error: T,
}

#[derive(Clone, Debug)]
pub struct TraceEvaluation<T> {
    pub target: String,
    pub rows: Vec<TraceRow<T>>,
    pub relative_l2: T,
}

/// Reconstructed boundary data along a registered target.
///
/// The trace is sampled on `n` time levels in 1D and on an `n x n` grid of
/// (free coordinate, time) in 2D, keeping only points owned by the field.
pub fn boundary_trace<T: Scalar>(
    case: &CaseDefinition<T>,
    basis: &ElmBasis<T>,
    theta: &DVector<T>,
    target_name: &str,
    n: usize,
) -> Result<TraceEvaluation<T>> {
    check_theta(case, basis, theta)?;
    let target = case.target(target_name)?;
    let domain = case.geometry.domain();
    let ts = domain.t().linspace(n);
    let dim = case.input_dim();
    let mut points: Vec<T> = Vec::new();
    let mut coords: Vec<T> = Vec::new();
    let mut push = |p: Vec<T>, coord: T| {
        if in_field_region(case, target.field, &p) {
            points.extend_from_slice(&p);
            coords.push(coord);
        }
    };
    let x_face = |face: Face| {
        if face == Face::XLo {
            domain.x().lo
        } else {
            domain.x().hi
        }
    };
    match (domain.y(), target.face) {
        (None, Face::XLo | Face::XHi) => {
            let x = x_face(target.face);
            for &t in &ts {
                push(vec![x, t], x);
            }
        }
        (Some(yr), Face::XLo | Face::XHi) => {
            let x = x_face(target.face);
            for &t in &ts {
                for y in yr.linspace(n) {
                    push(vec![x, y, t], y);
                }
            }
        }
        (Some(yr), Face::YLo | Face::YHi) => {
            let y = if target.face == Face::YLo {
                yr.lo
            } else {
                yr.hi
            };
            for &t in &ts {
                for x in domain.x().linspace(n) {
                    push(vec![x, y, t], x);
                }
            }
        }
        (None, face) => {
            return Err(Error::MissingFace {
                face: face.to_string(),
                spatial_dim: 1,
            })
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptyGrid(format!("trace {target_name}")));
    }
    let weights = field_block(theta, basis.neurons(), target.field);
    let predicted = predict_all(basis, weights, target.order, &points, dim)?;
    let exact: Vec<T> = points.chunks(dim).map(|p| (target.exact)(p)).collect();
    let relative_l2 = relative_l2(&exact, &predicted)?;
    let rows = points
        .chunks(dim)
        .zip(coords)
        .zip(exact.iter().zip(&predicted))
        .map(|((p, coord), (&e, &q))| TraceRow {
            coord,
            t: p[dim - 1],
            exact: e,
            predicted: q,
            abs_error: (e - q).abs(),
        })
        .collect();
    Ok(TraceEvaluation {
        target: target.name.clone(),
        rows,
        relative_l2,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedOutcome<T> {
    pub seed: u64,
    /// Aggregate relative L2, or the failure message.
    pub result: std::result::Result<T, String>,
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialStats<T> {
    pub outcomes: Vec<SeedOutcome<T>>,
    pub min: Option<T>,
    pub median: Option<T>,
    pub max: Option<T>,
    pub failures: usize,
}

impl<T: Scalar> TrialStats<T> {
    pub fn from_outcomes(outcomes: Vec<SeedOutcome<T>>) -> Self {
        let mut values: Vec<T> = outcomes
            .iter()
            .filter_map(|o| o.result.clone().ok())
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let failures = outcomes.len() - values.len();
        let median = match values.len() {
            0 => None,
            n if n % 2 == 1 => Some(values[n / 2]),
            n => Some((values[n / 2 - 1] + values[n / 2]) / T::lit(2.0)),
        };
        Self {
            min: values.first().copied(),
            max: values.last().copied(),
            median,
            failures,
            outcomes,
        }
    }

    /// `max / min` over successful seeds.
    pub fn spread_ratio(&self) -> Option<T> {
        match (self.min, self.max) {
            (Some(lo), Some(hi)) if lo > T::zero() => Some(hi / lo),
            _ => None,
        }
    }
}

/// Repeats the full pipeline for each seed; failing seeds are recorded.
pub fn robustness_trial<T: Scalar>(
    case: &CaseDefinition<T>,
    seeds: &[u64],
    config: &PielmConfig<T>,
) -> Result<TrialStats<T>> {
    if seeds.len() < 2 {
        return Err(Error::TooFewSeeds {
            required: 2,
            got: seeds.len(),
        });
    }
    let outcomes = seeds
        .iter()
        .map(|&seed| {
            let solved = solve_case(case, config, seed);
            let wall_time = solved
                .as_ref()
                .map(|s| s.training_time())
                .unwrap_or_default();
            let result = solved
                .and_then(|s| evaluate_field(case, &s.basis, &s.theta, config.grid))
                .map(|e| e.aggregate)
                .map_err(|e| e.to_string());
            SeedOutcome {
                seed,
                result,
                wall_time,
            }
        })
        .collect();
    Ok(TrialStats::from_outcomes(outcomes))
}
