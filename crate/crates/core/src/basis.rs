//! The fixed random hidden layer and its closed-form derivatives.
//!
//! Coordinates are ordered `(x, t)` in one space dimension and `(x, y, t)`
//! in two. Every derivative of a hidden unit factorises as
//!
//! ```text
//! D^a h_m(p) = prod_i (w_{m,i} c_i)^{a_i} * tanh^(|a|)(z_m),
//! z_m = sum_i w_{m,i} c_i (p_i - o_i) + b_m
//! ```
//!
//! where `(c, o)` is the optional affine input scaling (identity by default),
//! `tanh' = 1 - tanh^2` and `tanh'' = -2 tanh (1 - tanh^2)`.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::rng::UniformStream;
use crate::Scalar;

/// Highest per-coordinate and total derivative order supported.
pub const MAX_ORDER: u8 = 2;

/// Multi-index of partial derivative orders, one entry per coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DerivOrder {
    orders: [u8; 3],
    dim: u8,
}

impl DerivOrder {
    pub fn new(orders: &[u8]) -> Result<Self> {
        let total: u32 = orders.iter().map(|&o| u32::from(o)).sum();
        if orders.is_empty() || orders.len() > 3 || total > u32::from(MAX_ORDER) {
            return Err(Error::UnsupportedOrder(orders.to_vec()));
        }
        let mut packed = [0u8; 3];
        packed[..orders.len()].copy_from_slice(orders);
        Ok(Self {
            orders: packed,
            dim: orders.len() as u8,
        })
    }

    /// The identity operator (no differentiation).
    pub fn zero(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "dimension {dim} out of range");
        Self {
            orders: [0; 3],
            dim: dim as u8,
        }
    }

    /// Differentiates `order` times along `axis` only.
    pub fn along(dim: usize, axis: usize, order: u8) -> Self {
        assert!(axis < dim && order <= MAX_ORDER, "invalid axis/order");
        let mut d = Self::zero(dim);
        d.orders[axis] = order;
        d
    }

    pub fn dx(dim: usize) -> Self {
        Self::along(dim, 0, 1)
    }

    pub fn dxx(dim: usize) -> Self {
        Self::along(dim, 0, 2)
    }

    /// Panics in one space dimension, where there is no `y`.
    pub fn dy(dim: usize) -> Self {
        assert_eq!(dim, 3, "d/dy needs a (x, y, t) point");
        Self::along(dim, 1, 1)
    }

    pub fn dyy(dim: usize) -> Self {
        assert_eq!(dim, 3, "d2/dy2 needs a (x, y, t) point");
        Self::along(dim, 1, 2)
    }

    /// Time is always the last coordinate.
    pub fn dt(dim: usize) -> Self {
        Self::along(dim, dim - 1, 1)
    }

    pub fn orders(&self) -> &[u8] {
        &self.orders[..self.dim as usize]
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn total(&self) -> u8 {
        self.orders().iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Tanh,
}

/// Affine map `p -> scale * (p - shift)` applied before the hidden layer.
#[derive(Clone, Debug, PartialEq)]
pub struct InputScaling<T> {
    shift: Vec<T>,
    scale: Vec<T>,
}

impl<T: Scalar> InputScaling<T> {
    /// Maps each `[lo, hi]` onto `[-1, 1]`.
    pub fn to_unit_box(bounds: &[(T, T)]) -> Result<Self> {
        let two = T::lit(2.0);
        let mut shift = Vec::with_capacity(bounds.len());
        let mut scale = Vec::with_capacity(bounds.len());
        for &(lo, hi) in bounds {
            if lo.partial_cmp(&hi) != Some(Ordering::Less) {
                return Err(Error::InvalidInterval {
                    lo: lo.as_f64(),
                    hi: hi.as_f64(),
                });
            }
            shift.push((lo + hi) / two);
            scale.push(two / (hi - lo));
        }
        Ok(Self { shift, scale })
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }
}

/// Per-point activation values shared by every derivative order.
#[derive(Clone, Debug)]
pub struct ActivationTable<T> {
    /// `tanh(z_m)`
    pub value: Vec<T>,
    /// `tanh'(z_m)`
    pub first: Vec<T>,
    /// `tanh''(z_m)`
    pub second: Vec<T>,
}

/// Single hidden layer with random, frozen input weights and biases.
#[derive(Clone, Debug, PartialEq)]
pub struct ElmBasis<T> {
    /// `M x d`, one row per hidden unit.
    weights: DMatrix<T>,
    biases: DVector<T>,
    activation: Activation,
    interval: (T, T),
    scaling: Option<InputScaling<T>>,
}

impl<T: Scalar> ElmBasis<T> {
    /// Draws weights and biases uniformly from `interval`.
    ///
    /// Draw order on stream 0 of `seed`: weights row by row (unit `m`,
    /// then coordinate), followed by the `M` biases.
    pub fn new(input_dim: usize, neurons: usize, seed: u64, interval: (T, T)) -> Result<Self> {
        if !(2..=3).contains(&input_dim) {
            return Err(Error::UnsupportedDimension(input_dim));
        }
        if neurons == 0 {
            return Err(Error::NoNeurons);
        }
        let (lo, hi) = interval;
        if lo.partial_cmp(&hi).is_none_or(Ordering::is_gt) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInterval {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        let mut stream = UniformStream::new(seed, 0);
        let mut weights = DMatrix::zeros(neurons, input_dim);
        for m in 0..neurons {
            for i in 0..input_dim {
                weights[(m, i)] = stream.next_in(lo, hi);
            }
        }
        let biases = DVector::from_fn(neurons, |_, _| stream.next_in(lo, hi));
        Ok(Self {
            weights,
            biases,
            activation: Activation::Tanh,
            interval,
            scaling: None,
        })
    }

    /// Builds a basis from explicit parameters (`weights` is `M x d`).
    pub fn from_parts(weights: DMatrix<T>, biases: DVector<T>) -> Result<Self> {
        if weights.nrows() == 0 {
            return Err(Error::NoNeurons);
        }
        if !(2..=3).contains(&weights.ncols()) {
            return Err(Error::UnsupportedDimension(weights.ncols()));
        }
        if biases.len() != weights.nrows() {
            return Err(Error::LengthMismatch {
                expected: weights.nrows(),
                got: biases.len(),
            });
        }
        let lo = weights
            .iter()
            .chain(biases.iter())
            .copied()
            .fold(T::zero(), T::min);
        let hi = weights
            .iter()
            .chain(biases.iter())
            .copied()
            .fold(T::zero(), T::max);
        Ok(Self {
            weights,
            biases,
            activation: Activation::Tanh,
            interval: (lo, hi),
            scaling: None,
        })
    }

    pub fn with_input_scaling(mut self, scaling: InputScaling<T>) -> Result<Self> {
        if scaling.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: scaling.dim(),
            });
        }
        self.scaling = Some(scaling);
        Ok(self)
    }

    pub fn input_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn neurons(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<T> {
        &self.weights
    }

    pub fn biases(&self) -> &DVector<T> {
        &self.biases
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn interval(&self) -> (T, T) {
        self.interval
    }

    fn check_point(&self, point: &[T]) -> Result<()> {
        if point.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: point.len(),
            });
        }
        Ok(())
    }

    fn check_order(&self, order: DerivOrder) -> Result<()> {
        if order.dim() != self.input_dim() || order.total() > MAX_ORDER {
            return Err(Error::UnsupportedOrder(order.orders().to_vec()));
        }
        Ok(())
    }

    /// Chain-rule factor contributed by the input scaling along `axis`.
    #[inline]
    fn axis_scale(&self, axis: usize) -> T {
        self.scaling.as_ref().map_or(T::one(), |s| s.scale[axis])
    }

    #[inline]
    fn pre_activation(&self, m: usize, point: &[T]) -> T {
        let mut z = self.biases[m];
        for (i, &p) in point.iter().enumerate() {
            let coord = match &self.scaling {
                Some(s) => s.scale[i] * (p - s.shift[i]),
                None => p,
            };
            z += self.weights[(m, i)] * coord;
        }
        z
    }

    /// Evaluates `tanh` and its first two derivatives for every hidden unit.
    pub fn activations(&self, point: &[T]) -> Result<ActivationTable<T>> {
        self.check_point(point)?;
        let m = self.neurons();
        let mut table = ActivationTable {
            value: Vec::with_capacity(m),
            first: Vec::with_capacity(m),
            second: Vec::with_capacity(m),
        };
        let two = T::lit(2.0);
        for unit in 0..m {
            let s = self.pre_activation(unit, point).tanh();
            let ds = T::one() - s * s;
            table.value.push(s);
            table.first.push(ds);
            table.second.push(-two * s * ds);
        }
        Ok(table)
    }

    /// Accumulates `factor * D^order H(p)` into `out` using a precomputed table.
    pub fn accumulate_derivs(
        &self,
        table: &ActivationTable<T>,
        order: DerivOrder,
        factor: T,
        out: &mut [T],
    ) -> Result<()> {
        self.check_order(order)?;
        if out.len() != self.neurons() {
            return Err(Error::LengthMismatch {
                expected: self.neurons(),
                got: out.len(),
            });
        }
        let sigma = match order.total() {
            0 => &table.value,
            1 => &table.first,
            _ => &table.second,
        };
        let active: Vec<(usize, u8, T)> = order
            .orders()
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0)
            .map(|(i, &a)| (i, a, self.axis_scale(i)))
            .collect();
        for (m, slot) in out.iter_mut().enumerate() {
            let mut coef = factor;
            for &(i, a, c) in &active {
                let w = self.weights[(m, i)] * c;
                coef *= if a == 1 { w } else { w * w };
            }
            *slot += coef * sigma[m];
        }
        Ok(())
    }

    /// Hidden-layer output `H(p)`.
    pub fn eval_features(&self, point: &[T]) -> Result<DVector<T>> {
        self.check_point(point)?;
        Ok(DVector::from_fn(self.neurons(), |m, _| {
            self.pre_activation(m, point).tanh()
        }))
    }

    /// `D^order H(p)` in closed form.
    pub fn eval_feature_derivs(&self, point: &[T], order: DerivOrder) -> Result<DVector<T>> {
        self.check_order(order)?;
        if order.total() == 0 {
            return self.eval_features(point);
        }
        let table = self.activations(point)?;
        let mut out = vec![T::zero(); self.neurons()];
        self.accumulate_derivs(&table, order, T::one(), &mut out)?;
        Ok(DVector::from_vec(out))
    }

    /// `D^order (H(p) . theta_block)` for one output field.
    pub fn predict(&self, point: &[T], order: DerivOrder, theta_block: &[T]) -> Result<T> {
        if theta_block.len() != self.neurons() {
            return Err(Error::LengthMismatch {
                expected: self.neurons(),
                got: theta_block.len(),
            });
        }
        let derivs = self.eval_feature_derivs(point, order)?;
        Ok(derivs
            .iter()
            .zip(theta_block)
            .fold(T::zero(), |acc, (&h, &c)| acc + h * c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;
    use nalgebra::dvector;

    fn single(w: &[f64], b: f64) -> ElmBasis<f64> {
        ElmBasis::from_parts(DMatrix::from_row_slice(1, w.len(), w), dvector![b]).unwrap()
    }

    #[test]
    fn entries_stay_in_interval() {
        let basis = ElmBasis::<f64>::new(2, 150, 11, (-1.0, 1.0)).unwrap();
        assert_eq!(basis.weights().len() + basis.biases().len(), 450);
        assert!(basis
            .weights()
            .iter()
            .chain(basis.biases().iter())
            .all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn degenerate_interval_gives_zero_parameters() {
        let basis = ElmBasis::<f64>::new(2, 1, 99, (0.0, 0.0)).unwrap();
        assert_eq!(basis.weights(), &dmatrix![0.0, 0.0]);
        assert_eq!(basis.biases(), &dvector![0.0]);
    }

    #[test]
    fn construction_is_deterministic() {
        let a = ElmBasis::<f64>::new(3, 40, 5, (-1.0, 1.0)).unwrap();
        let b = ElmBasis::<f64>::new(3, 40, 5, (-1.0, 1.0)).unwrap();
        let c = ElmBasis::<f64>::new(3, 40, 6, (-1.0, 1.0)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(
            ElmBasis::<f64>::new(4, 10, 0, (-1.0, 1.0)),
            Err(Error::UnsupportedDimension(4))
        );
        assert_eq!(
            ElmBasis::<f64>::new(2, 0, 0, (-1.0, 1.0)),
            Err(Error::NoNeurons)
        );
        assert!(matches!(
            ElmBasis::<f64>::new(2, 3, 0, (1.0, -1.0)),
            Err(Error::InvalidInterval { .. })
        ));
        let basis = ElmBasis::<f64>::new(2, 3, 0, (-1.0, 1.0)).unwrap();
        assert!(matches!(
            basis.eval_features(&[0.0, 1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 3
            })
        ));
        assert!(DerivOrder::new(&[3, 0]).is_err());
        assert!(DerivOrder::new(&[1, 1, 1]).is_err());
    }

    #[test]
    fn zero_unit_outputs_zero() {
        let basis = single(&[0.0, 0.0], 0.0);
        assert_eq!(basis.eval_features(&[0.3, 0.8]).unwrap()[0], 0.0);
    }

    #[test]
    fn feature_value_matches_tanh_half() {
        let basis = single(&[1.0, 0.0], 0.0);
        let h = basis.eval_features(&[0.5, 0.9]).unwrap()[0];
        assert_relative_eq!(h, 0.462_117_157_26, epsilon = 1e-10);
    }

    #[test]
    fn features_lie_in_open_unit_interval() {
        let basis = ElmBasis::<f64>::new(3, 64, 2, (-1.0, 1.0)).unwrap();
        let h = basis.eval_features(&[3.0, -2.0, 0.5]).unwrap();
        assert!(h.iter().all(|v| v.abs() < 1.0));
    }

    #[test]
    fn second_derivative_vanishes_at_zero_preactivation() {
        let basis = single(&[0.8, -0.4], 0.0);
        let d = basis
            .eval_feature_derivs(&[0.0, 0.0], DerivOrder::dxx(2))
            .unwrap();
        assert_eq!(d[0], 0.0);
    }

    #[test]
    fn time_derivative_matches_finite_difference_value() {
        // Frozen from a central difference of tanh(0.3 + 0.7 t + 0.1) at t = 2, h = 1e-5.
        let basis = single(&[0.3, 0.7], 0.1);
        let d = basis
            .eval_feature_derivs(&[1.0, 2.0], DerivOrder::dt(2))
            .unwrap();
        assert_relative_eq!(d[0], 0.072_490_861_83, max_relative = 1e-9);
    }

    #[test]
    fn zeroth_order_is_feature_map() {
        let basis = ElmBasis::<f64>::new(2, 20, 4, (-1.0, 1.0)).unwrap();
        let p = [0.25, 0.75];
        assert_eq!(
            basis.eval_feature_derivs(&p, DerivOrder::zero(2)).unwrap(),
            basis.eval_features(&p).unwrap()
        );
    }

    #[test]
    fn input_scaling_applies_chain_rule() {
        let raw = ElmBasis::<f64>::new(2, 8, 1, (-1.0, 1.0)).unwrap();
        let scaled = raw
            .clone()
            .with_input_scaling(InputScaling::to_unit_box(&[(0.0, 2.0), (0.0, 1.0)]).unwrap())
            .unwrap();
        // scaled(p) == raw(2(p_x - 1)/2, 2(p_t - 0.5))
        let p = [0.4, 0.3];
        let q = [p[0] - 1.0, 2.0 * (p[1] - 0.5)];
        let a = scaled.eval_feature_derivs(&p, DerivOrder::dt(2)).unwrap();
        let b = raw.eval_feature_derivs(&q, DerivOrder::dt(2)).unwrap() * 2.0;
        assert_relative_eq!(a, b, epsilon = 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let basis = ElmBasis::<f32>::new(2, 16, 3, (-1.0, 1.0)).unwrap();
        let d = basis
            .eval_feature_derivs(&[0.2, 0.1], DerivOrder::dx(2))
            .unwrap();
        assert_eq!(d.len(), 16);
        assert!(d.iter().all(|v| v.is_finite()));
    }
}
