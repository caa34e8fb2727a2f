//! Physical laws as linear functionals of the unknown fields, and their
//! assembly into one dense least-squares system over the stacked output
//! weights `theta = [theta_1; ...; theta_D]`.
//!
//! Field `j` owns columns `[j M, (j + 1) M)`. Rows are stacked in constraint
//! order, then point order, independent of how many threads assemble them.

use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::basis::{DerivOrder, ElmBasis, MAX_ORDER};
use crate::error::{Error, Result};
use crate::geometry::CollocationSet;
use crate::scalar::to_f64_vec;
use crate::Scalar;

pub type PointFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// A constant or a function of the space-time point.
#[derive(Clone)]
pub enum Coefficient<T> {
    Const(T),
    Func(PointFn<T>),
}

impl<T: Scalar> Coefficient<T> {
    pub fn func(f: impl Fn(&[T]) -> T + Send + Sync + 'static) -> Self {
        Coefficient::Func(Arc::new(f))
    }

    pub fn eval(&self, point: &[T]) -> T {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Func(f) => f(point),
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        match self {
            Coefficient::Const(c) => Coefficient::Const(*c * factor),
            Coefficient::Func(f) => {
                let f = Arc::clone(f);
                Coefficient::Func(Arc::new(move |p| f(p) * factor))
            }
        }
    }

    /// `self + offset`, used to perturb right-hand sides.
    pub fn shifted(&self, offset: T) -> Self {
        match self {
            Coefficient::Const(c) => Coefficient::Const(*c + offset),
            Coefficient::Func(f) => {
                let f = Arc::clone(f);
                Coefficient::Func(Arc::new(move |p| f(p) + offset))
            }
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Coefficient<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Const(c) => write!(f, "Const({c:?})"),
            Coefficient::Func(_) => f.write_str("Func(..)"),
        }
    }
}

/// `coeff(p) * D^order u_field(p)`.
#[derive(Clone, Debug)]
pub struct LinearTerm<T> {
    pub field: usize,
    pub order: DerivOrder,
    pub coeff: Coefficient<T>,
}

impl<T: Scalar> LinearTerm<T> {
    pub fn constant(field: usize, order: DerivOrder, coeff: T) -> Self {
        Self {
            field,
            order,
            coeff: Coefficient::Const(coeff),
        }
    }

    pub fn varying(
        field: usize,
        order: DerivOrder,
        coeff: impl Fn(&[T]) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            field,
            order,
            coeff: Coefficient::func(coeff),
        }
    }
}

/// `sum_k terms_k(p) = rhs(p)` enforced at every point of `points`.
#[derive(Clone, Debug)]
pub struct LinearConstraint<T> {
    pub label: String,
    pub terms: Vec<LinearTerm<T>>,
    pub rhs: Coefficient<T>,
    pub points: CollocationSet<T>,
    /// Multiplies both sides of every row; 1 leaves raw residuals.
    pub row_scale: T,
}

impl<T: Scalar> LinearConstraint<T> {
    pub fn new(
        label: impl Into<String>,
        terms: Vec<LinearTerm<T>>,
        rhs: Coefficient<T>,
        points: CollocationSet<T>,
    ) -> Result<Self> {
        let label = label.into();
        let invalid = |reason: &str| Error::InvalidConstraint {
            label: label.clone(),
            reason: reason.to_string(),
        };
        if terms.is_empty() {
            return Err(invalid("no terms"));
        }
        if points.is_empty() {
            return Err(invalid("no points"));
        }
        if terms
            .iter()
            .any(|t| t.order.dim() != points.dim() || t.order.total() > MAX_ORDER)
        {
            return Err(invalid(
                "derivative order does not match the point dimension",
            ));
        }
        Ok(Self {
            label,
            terms,
            rhs,
            points,
            row_scale: T::one(),
        })
    }

    pub fn with_row_scale(mut self, scale: T) -> Self {
        self.row_scale = scale;
        self
    }

    /// Highest field index referenced plus one.
    pub fn fields_used(&self) -> usize {
        self.terms.iter().map(|t| t.field + 1).max().unwrap_or(0)
    }

    fn non_finite(&self, what: &'static str, point: &[T]) -> Error {
        Error::NonFinite {
            label: self.label.clone(),
            what,
            point: to_f64_vec(point),
        }
    }

    /// Writes the scaled row into `out` (length `D M`, zeroed here) and
    /// returns the scaled right-hand side.
    fn row_into(&self, basis: &ElmBasis<T>, point: &[T], out: &mut [T]) -> Result<T> {
        out.iter_mut().for_each(|v| *v = T::zero());
        let m = basis.neurons();
        let table = basis.activations(point)?;
        for term in &self.terms {
            let c = term.coeff.eval(point);
            if !c.is_finite() {
                return Err(self.non_finite("coefficient", point));
            }
            let block = &mut out[term.field * m..(term.field + 1) * m];
            basis.accumulate_derivs(&table, term.order, c * self.row_scale, block)?;
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(self.non_finite("row entry", point));
        }
        let rhs = self.rhs.eval(point);
        if !rhs.is_finite() {
            return Err(self.non_finite("right-hand side", point));
        }
        Ok(rhs * self.row_scale)
    }
}

/// Builds one design-matrix row and its right-hand side.
pub fn assemble_row<T: Scalar>(
    basis: &ElmBasis<T>,
    constraint: &LinearConstraint<T>,
    point: &[T],
    field_count: usize,
) -> Result<(DVector<T>, T)> {
    check_constraint(basis, constraint, field_count)?;
    let mut row = vec![T::zero(); field_count * basis.neurons()];
    let rhs = constraint.row_into(basis, point, &mut row)?;
    Ok((DVector::from_vec(row), rhs))
}

fn check_constraint<T: Scalar>(
    basis: &ElmBasis<T>,
    constraint: &LinearConstraint<T>,
    field_count: usize,
) -> Result<()> {
    if constraint.points.dim() != basis.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.input_dim(),
            got: constraint.points.dim(),
        });
    }
    if let Some(bad) = constraint.terms.iter().find(|t| t.field >= field_count) {
        return Err(Error::UnknownField {
            field: bad.field,
            field_count,
        });
    }
    Ok(())
}

/// Contiguous rows that came from constraints sharing one label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelBlock {
    pub label: String,
    pub rows: Range<usize>,
}

#[derive(Clone, Debug)]
pub struct DesignSystem<T> {
    pub matrix: DMatrix<T>,
    pub rhs: DVector<T>,
    /// One entry per constraint, in row order.
    pub blocks: Vec<LabelBlock>,
    pub field_count: usize,
    pub neurons: usize,
}

impl<T: Scalar> DesignSystem<T> {
    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    /// Columns owned by `field`.
    pub fn field_columns(&self, field: usize) -> Range<usize> {
        field * self.neurons..(field + 1) * self.neurons
    }

    pub fn row_label(&self, row: usize) -> Option<&str> {
        self.blocks
            .iter()
            .find(|b| b.rows.contains(&row))
            .map(|b| b.label.as_str())
    }
}

/// Stacks every constraint into `A theta = r`.
pub fn assemble_system<T: Scalar>(
    basis: &ElmBasis<T>,
    constraints: &[LinearConstraint<T>],
    field_count: usize,
) -> Result<DesignSystem<T>> {
    if constraints.is_empty() {
        return Err(Error::EmptySystem);
    }
    for c in constraints {
        check_constraint(basis, c, field_count)?;
    }
    let cols = field_count * basis.neurons();
    let rows: usize = constraints.iter().map(|c| c.points.len()).sum();
    let mut data = vec![T::zero(); rows * cols];
    let mut rhs = vec![T::zero(); rows];
    let mut blocks = Vec::with_capacity(constraints.len());

    let mut start = 0;
    for c in constraints {
        let n = c.points.len();
        data[start * cols..(start + n) * cols]
            .par_chunks_mut(cols)
            .zip(rhs[start..start + n].par_iter_mut())
            .enumerate()
            .try_for_each(|(i, (row, r))| {
                *r = c.row_into(basis, c.points.point(i), row)?;
                Ok::<_, Error>(())
            })?;
        blocks.push(LabelBlock {
            label: c.label.clone(),
            rows: start..start + n,
        });
        start += n;
    }

    Ok(DesignSystem {
        matrix: DMatrix::from_row_slice(rows, cols, &data),
        rhs: DVector::from_vec(rhs),
        blocks,
        field_count,
        neurons: basis.neurons(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelNorm<T> {
    pub label: String,
    pub rows: usize,
    pub norm: T,
}

#[derive(Clone, Debug)]
pub struct Residual<T> {
    /// `A theta - r`
    pub vector: DVector<T>,
    pub norm: T,
    /// Euclidean norms grouped by label, in order of first appearance.
    pub per_label: Vec<LabelNorm<T>>,
}

pub fn residual<T: Scalar>(system: &DesignSystem<T>, theta: &DVector<T>) -> Result<Residual<T>> {
    if theta.len() != system.cols() {
        return Err(Error::LengthMismatch {
            expected: system.cols(),
            got: theta.len(),
        });
    }
    let vector = &system.matrix * theta - &system.rhs;
    let mut per_label: Vec<(String, usize, T)> = Vec::new();
    for block in &system.blocks {
        let sq = vector.rows_range(block.rows.clone()).norm_squared();
        match per_label.iter_mut().find(|(l, _, _)| *l == block.label) {
            Some(entry) => {
                entry.1 += block.rows.len();
                entry.2 += sq;
            }
            None => per_label.push((block.label.clone(), block.rows.len(), sq)),
        }
    }
    Ok(Residual {
        norm: vector.norm(),
        vector,
        per_label: per_label
            .into_iter()
            .map(|(label, rows, sq)| LabelNorm {
                label,
                rows,
                norm: sq.sqrt(),
            })
            .collect(),
    })
}

/// Fields given in closed form, with their partial derivatives.
pub trait FieldOracle<T> {
    fn derivative(&self, field: usize, order: DerivOrder, point: &[T]) -> T;
}

impl<T, F> FieldOracle<T> for F
where
    F: Fn(usize, DerivOrder, &[T]) -> T,
{
    fn derivative(&self, field: usize, order: DerivOrder, point: &[T]) -> T {
        self(field, order, point)
    }
}

/// `lhs(p) - rhs(p)` for the constraint applied to closed-form fields,
/// with the same term semantics as [`assemble_row`] (row scaling excluded).
pub fn apply_to_fields<T: Scalar>(
    constraint: &LinearConstraint<T>,
    fields: &impl FieldOracle<T>,
    point: &[T],
) -> T {
    let lhs = constraint.terms.iter().fold(T::zero(), |acc, term| {
        acc + term.coeff.eval(point) * fields.derivative(term.field, term.order, point)
    });
    lhs - constraint.rhs.eval(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    fn unit_basis() -> ElmBasis<f64> {
        ElmBasis::from_parts(DMatrix::from_row_slice(1, 2, &[1.0, 1.0]), dvector![0.0]).unwrap()
    }

    fn points(coords: &[f64]) -> CollocationSet<f64> {
        CollocationSet::new("pts", 2, coords.to_vec()).unwrap()
    }

    fn heat(points: CollocationSet<f64>) -> LinearConstraint<f64> {
        LinearConstraint::new(
            "pde",
            vec![
                LinearTerm::constant(0, DerivOrder::dt(2), 1.0),
                LinearTerm::constant(0, DerivOrder::dxx(2), -1.0),
            ],
            Coefficient::Const(0.0),
            points,
        )
        .unwrap()
    }

    #[test]
    fn heat_row_at_origin() {
        let (row, rhs) =
            assemble_row(&unit_basis(), &heat(points(&[0.0, 0.0])), &[0.0, 0.0], 1).unwrap();
        assert_eq!(row.as_slice(), &[1.0]);
        assert_eq!(rhs, 0.0);
    }

    #[test]
    fn stefan_row_fills_both_blocks() {
        let basis = ElmBasis::<f64>::new(2, 5, 3, (-1.0, 1.0)).unwrap();
        let c = LinearConstraint::new(
            "stefan",
            vec![
                LinearTerm::constant(0, DerivOrder::dx(2), -2.0),
                LinearTerm::constant(1, DerivOrder::dx(2), 1.0),
            ],
            Coefficient::Const(1.0),
            points(&[0.7, 0.2]),
        )
        .unwrap();
        let p = [0.7, 0.2];
        let (row, rhs) = assemble_row(&basis, &c, &p, 2).unwrap();
        let hx = basis.eval_feature_derivs(&p, DerivOrder::dx(2)).unwrap();
        assert_eq!(rhs, 1.0);
        assert_relative_eq!(row.rows(0, 5).into_owned(), &hx * -2.0);
        assert_relative_eq!(row.rows(5, 5).into_owned(), hx);
    }

    #[test]
    fn scaling_constraint_scales_row() {
        let basis = ElmBasis::<f64>::new(2, 6, 1, (-1.0, 1.0)).unwrap();
        let base = heat(points(&[0.3, 0.4]));
        let mut scaled = base.clone();
        for term in &mut scaled.terms {
            term.coeff = term.coeff.scaled(3.5);
        }
        scaled.rhs = Coefficient::Const(2.0 * 3.5);
        let mut base = base;
        base.rhs = Coefficient::Const(2.0);
        let (r0, b0) = assemble_row(&basis, &base, &[0.3, 0.4], 1).unwrap();
        let (r1, b1) = assemble_row(&basis, &scaled, &[0.3, 0.4], 1).unwrap();
        assert_relative_eq!(r1, r0 * 3.5, max_relative = 1e-14);
        assert_relative_eq!(b1, b0 * 3.5);
    }

    #[test]
    fn rows_are_additive_over_terms() {
        let basis = ElmBasis::<f64>::new(2, 6, 2, (-1.0, 1.0)).unwrap();
        let p = [0.2, 0.9];
        let full = heat(points(&p));
        let mut only_t = full.clone();
        only_t.terms.truncate(1);
        let mut only_xx = full.clone();
        only_xx.terms.remove(0);
        let (a, _) = assemble_row(&basis, &full, &p, 1).unwrap();
        let (b, _) = assemble_row(&basis, &only_t, &p, 1).unwrap();
        let (c, _) = assemble_row(&basis, &only_xx, &p, 1).unwrap();
        assert_relative_eq!(a, b + c, epsilon = 1e-15);
    }

    #[test]
    fn non_finite_coefficients_name_the_constraint() {
        let c = LinearConstraint::new(
            "broken",
            vec![LinearTerm::varying(
                0,
                DerivOrder::zero(2),
                |_: &[f64]| f64::NAN,
            )],
            Coefficient::Const(0.0),
            points(&[0.1, 0.1]),
        )
        .unwrap();
        let err = assemble_row(&unit_basis(), &c, &[0.1, 0.1], 1).unwrap_err();
        assert!(matches!(err, Error::NonFinite { ref label, .. } if label == "broken"));
    }

    #[test]
    fn system_shape_and_labels() {
        let basis = ElmBasis::<f64>::new(2, 4, 0, (-1.0, 1.0)).unwrap();
        let a = heat(points(&[0.1, 0.1, 0.2, 0.2, 0.3, 0.3]));
        let mut b = heat(points(&[0.5, 0.5]));
        b.label = "other".into();
        b.terms[0].field = 1;
        b.terms[1].field = 1;
        let sys = assemble_system(&basis, &[a, b], 2).unwrap();
        assert_eq!((sys.rows(), sys.cols()), (4, 8));
        assert_eq!(sys.row_label(2), Some("pde"));
        assert_eq!(sys.row_label(3), Some("other"));
        // Block isolation: field-0 rows are zero in field-1 columns and vice versa.
        for r in 0..3 {
            assert!(sys.matrix.row(r).columns(4, 4).iter().all(|&v| v == 0.0));
        }
        assert!(sys.matrix.row(3).columns(0, 4).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn empty_and_mismatched_systems_rejected() {
        let basis = ElmBasis::<f64>::new(2, 4, 0, (-1.0, 1.0)).unwrap();
        assert!(matches!(
            assemble_system::<f64>(&basis, &[], 1),
            Err(Error::EmptySystem)
        ));
        let basis3 = ElmBasis::<f64>::new(3, 4, 0, (-1.0, 1.0)).unwrap();
        assert!(matches!(
            assemble_system(&basis3, &[heat(points(&[0.1, 0.1]))], 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            assemble_system(&basis, &[heat(points(&[0.1, 0.1]))], 0),
            Err(Error::UnknownField { .. })
        ));
    }

    #[test]
    fn residual_of_zero_theta_is_negated_rhs() {
        let basis = ElmBasis::<f64>::new(2, 3, 0, (-1.0, 1.0)).unwrap();
        let mut c = heat(points(&[0.1, 0.1, 0.4, 0.2]));
        c.rhs = Coefficient::func(|p: &[f64]| p[0] + 1.0);
        let sys = assemble_system(&basis, &[c], 1).unwrap();
        let res = residual(&sys, &DVector::zeros(3)).unwrap();
        assert_eq!(res.vector, -&sys.rhs);
        assert_eq!(res.per_label.len(), 1);
        assert_eq!(res.per_label[0].rows, 2);
        assert!(residual(&sys, &DVector::zeros(4)).is_err());
    }

    #[test]
    fn residual_vanishes_for_identity_system() {
        let theta = dvector![1.0, -2.0, 3.0];
        let sys = DesignSystem {
            matrix: DMatrix::identity(3, 3),
            rhs: theta.clone(),
            blocks: vec![LabelBlock {
                label: "id".into(),
                rows: 0..3,
            }],
            field_count: 1,
            neurons: 3,
        };
        assert_eq!(residual(&sys, &theta).unwrap().norm, 0.0);
    }

    #[test]
    fn apply_to_fields_uses_term_semantics() {
        // u = x^2 / 2 + t solves u_t - u_xx = 0.
        let oracle = |_: usize, order: DerivOrder, p: &[f64]| match order.orders() {
            [0, 0] => p[0] * p[0] / 2.0 + p[1],
            [0, 1] => 1.0,
            [2, 0] => 1.0,
            _ => 0.0,
        };
        let c = heat(points(&[0.3, 0.6]));
        assert_eq!(apply_to_fields(&c, &oracle, &[0.3, 0.6]), 0.0);
    }

    #[test]
    fn row_scale_multiplies_both_sides() {
        let basis = ElmBasis::<f64>::new(2, 3, 9, (-1.0, 1.0)).unwrap();
        let mut c = heat(points(&[0.2, 0.2]));
        c.rhs = Coefficient::Const(1.5);
        let (r0, b0) = assemble_row(&basis, &c, &[0.2, 0.2], 1).unwrap();
        let (r1, b1) = assemble_row(&basis, &c.with_row_scale(10.0), &[0.2, 0.2], 1).unwrap();
        assert_relative_eq!(r1, r0 * 10.0);
        assert_eq!(b1, b0 * 10.0);
    }
}
