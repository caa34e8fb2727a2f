//! One end-to-end solve: basis, collocation, assembly, least squares.

use std::time::{Duration, Instant};

use nalgebra::DVector;

use crate::basis::{DerivOrder, ElmBasis, InputScaling};
use crate::cases::{CaseDefinition, SamplingPlan};
use crate::constraints::{assemble_system, residual, Residual};
use crate::error::{Error, Result};
use crate::geometry::SamplingStrategy;
use crate::lstsq::{solve_min_norm, SolveDiagnostics, DEFAULT_RCOND};
use crate::Scalar;

/// Default resolution of the evaluation grid per axis.
pub const DEFAULT_GRID: usize = 100;

/// Solver hyperparameters. [`PielmConfig::for_spatial_dim`] gives the
/// standard settings: 150 neurons with 100 collocation and 50 initial
/// points in 1D, 200 neurons with 2000 and 401 in 2D, weights and biases
/// uniform in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PielmConfig<T> {
    pub neurons: usize,
    pub n_collocation: usize,
    pub n_initial: usize,
    pub rcond: T,
    pub weight_interval: (T, T),
    pub sampling: SamplingStrategy,
    pub normalize_inputs: bool,
    /// Extra multiplier for rows carrying a given label.
    pub row_scales: Vec<(String, T)>,
    pub grid: usize,
}

impl<T: Scalar> PielmConfig<T> {
    pub fn for_spatial_dim(spatial_dim: usize) -> Self {
        let (neurons, n_collocation, n_initial) = if spatial_dim >= 2 {
            (200, 2000, 401)
        } else {
            (150, 100, 50)
        };
        Self {
            neurons,
            n_collocation,
            n_initial,
            // Never below the working precision (matters for `f32`).
            rcond: T::lit(DEFAULT_RCOND).max(T::machine_eps()),
            weight_interval: (T::lit(-1.0), T::one()),
            sampling: SamplingStrategy::Random,
            normalize_inputs: false,
            row_scales: Vec::new(),
            grid: DEFAULT_GRID,
        }
    }

    pub fn for_case(case: &CaseDefinition<T>) -> Self {
        Self::for_spatial_dim(case.spatial_dim())
    }

    fn row_scale(&self, label: &str) -> T {
        self.row_scales
            .iter()
            .filter(|(l, _)| l == label)
            .map(|(_, s)| *s)
            .last()
            .unwrap_or_else(T::one)
    }
}

#[derive(Clone, Debug)]
pub struct Solution<T> {
    pub basis: ElmBasis<T>,
    /// Stacked output weights, field `j` in `[j M, (j + 1) M)`.
    pub theta: DVector<T>,
    pub field_count: usize,
    pub rows: usize,
    pub diagnostics: SolveDiagnostics<T>,
    pub residual: Residual<T>,
    pub assembly_time: Duration,
}

impl<T: Scalar> Solution<T> {
    pub fn field_weights(&self, field: usize) -> &[T] {
        field_block(&self.theta, self.basis.neurons(), field)
    }

    pub fn predict(&self, field: usize, order: DerivOrder, point: &[T]) -> Result<T> {
        if field >= self.field_count {
            return Err(Error::UnknownField {
                field,
                field_count: self.field_count,
            });
        }
        self.basis.predict(point, order, self.field_weights(field))
    }

    /// Assembly plus least-squares time.
    pub fn training_time(&self) -> Duration {
        self.assembly_time + self.diagnostics.solve_time
    }
}

pub(crate) fn field_block<T>(theta: &DVector<T>, neurons: usize, field: usize) -> &[T] {
    &theta.as_slice()[field * neurons..(field + 1) * neurons]
}

/// Builds the hidden layer for `case` from `seed` (stream 0).
pub fn build_basis<T: Scalar>(
    case: &CaseDefinition<T>,
    config: &PielmConfig<T>,
    seed: u64,
) -> Result<ElmBasis<T>> {
    let basis = ElmBasis::new(
        case.input_dim(),
        config.neurons,
        seed,
        config.weight_interval,
    )?;
    if config.normalize_inputs {
        let scaling = InputScaling::to_unit_box(&case.geometry.domain().bounds())?;
        basis.with_input_scaling(scaling)
    } else {
        Ok(basis)
    }
}

/// Runs the whole method for one seed.
pub fn solve_case<T: Scalar>(
    case: &CaseDefinition<T>,
    config: &PielmConfig<T>,
    seed: u64,
) -> Result<Solution<T>> {
    let start = Instant::now();
    let basis = build_basis(case, config, seed)?;
    let plan = SamplingPlan {
        n_collocation: config.n_collocation,
        n_initial: config.n_initial,
        seed,
        strategy: config.sampling,
    };
    let constraints = case.build_constraints(&plan)?;
    if let Some((label, _)) = config
        .row_scales
        .iter()
        .find(|(l, _)| !constraints.iter().any(|c| &c.label == l))
    {
        return Err(Error::UnknownLabel(label.clone()));
    }
    let constraints: Vec<_> = constraints
        .into_iter()
        .map(|c| {
            let scale = config.row_scale(&c.label);
            c.with_row_scale(scale)
        })
        .collect();
    let system = assemble_system(&basis, &constraints, case.field_count())?;
    let assembly_time = start.elapsed();

    let (theta, diagnostics) = solve_min_norm(&system.matrix, &system.rhs, config.rcond)?;
    let residual = residual(&system, &theta)?;
    Ok(Solution {
        basis,
        theta,
        field_count: case.field_count(),
        rows: system.rows(),
        diagnostics,
        residual,
        assembly_time,
    })
}
