//! Space-time domains split by a prescribed moving interface `x = s(y, t)`,
//! and the collocation samplers that respect that split.
//!
//! Points are stored as flat coordinate tuples in the global `(x, t)` or
//! `(x, y, t)` order.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rng::UniformStream;
use crate::Scalar;

/// Relative width of the band around `s` that classifies as interface.
pub const INTERFACE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if lo.partial_cmp(&hi) != Some(Ordering::Less) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInterval {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn contains(&self, v: T) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// `lo + u (hi - lo)`.
    pub fn lerp(&self, u: T) -> T {
        self.lo + u * self.width()
    }

    /// `n` equally spaced nodes including both endpoints (`n = 1` gives `lo`).
    pub fn linspace(&self, n: usize) -> Vec<T> {
        if n <= 1 {
            return vec![self.lo; n];
        }
        let last = T::lit((n - 1) as f64);
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.hi
                } else {
                    self.lerp(T::lit(i as f64) / last)
                }
            })
            .collect()
    }

    fn check(&self, what: &'static str, v: T) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                what,
                value: v.as_f64(),
                lo: self.lo.as_f64(),
                hi: self.hi.as_f64(),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceTimeDomain<T> {
    x: Interval<T>,
    y: Option<Interval<T>>,
    t: Interval<T>,
}

impl<T: Scalar> SpaceTimeDomain<T> {
    pub fn one_d(x: Interval<T>, t: Interval<T>) -> Self {
        Self { x, y: None, t }
    }

    pub fn two_d(x: Interval<T>, y: Interval<T>, t: Interval<T>) -> Self {
        Self { x, y: Some(y), t }
    }

    pub fn x(&self) -> Interval<T> {
        self.x
    }

    pub fn y(&self) -> Option<Interval<T>> {
        self.y
    }

    pub fn t(&self) -> Interval<T> {
        self.t
    }

    pub fn spatial_dim(&self) -> usize {
        if self.y.is_some() {
            2
        } else {
            1
        }
    }

    /// Length of a space-time point: 2 in 1D, 3 in 2D.
    pub fn input_dim(&self) -> usize {
        self.spatial_dim() + 1
    }

    /// Bounds per coordinate in global order.
    pub fn bounds(&self) -> Vec<(T, T)> {
        let mut b = vec![(self.x.lo, self.x.hi)];
        if let Some(y) = self.y {
            b.push((y.lo, y.hi));
        }
        b.push((self.t.lo, self.t.hi));
        b
    }

    pub fn contains(&self, point: &[T]) -> bool {
        point.len() == self.input_dim()
            && self
                .bounds()
                .iter()
                .zip(point)
                .all(|(&(lo, hi), &p)| lo <= p && p <= hi)
    }

    /// Splits a point into `(x, y, t)`; `y` is zero in 1D.
    pub fn split(&self, point: &[T]) -> (T, T, T) {
        match self.y {
            Some(_) => (point[0], point[1], point[2]),
            None => (point[0], T::zero(), point[1]),
        }
    }

    fn join(&self, x: T, y: T, t: T, out: &mut Vec<T>) {
        out.push(x);
        if self.y.is_some() {
            out.push(y);
        }
        out.push(t);
    }
}

/// A closure of `(y, t)`; one-dimensional boundaries ignore `y`.
pub type BoundaryFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;

/// Prescribed interface position and its partial derivatives.
#[derive(Clone)]
pub struct MovingBoundary<T> {
    position: BoundaryFn<T>,
    d_dt: BoundaryFn<T>,
    d_dy: BoundaryFn<T>,
}

impl<T: Scalar> MovingBoundary<T> {
    pub fn new(position: BoundaryFn<T>, d_dt: BoundaryFn<T>, d_dy: BoundaryFn<T>) -> Self {
        Self {
            position,
            d_dt,
            d_dy,
        }
    }

    /// `x = s(t)` with `ds/dy = 0`.
    pub fn one_d(
        position: impl Fn(T) -> T + Send + Sync + 'static,
        d_dt: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        Self {
            position: Arc::new(move |_, t| position(t)),
            d_dt: Arc::new(move |_, t| d_dt(t)),
            d_dy: Arc::new(|_, _| T::zero()),
        }
    }

    pub fn s(&self, y: T, t: T) -> T {
        (self.position)(y, t)
    }

    pub fn ds_dt(&self, y: T, t: T) -> T {
        (self.d_dt)(y, t)
    }

    pub fn ds_dy(&self, y: T, t: T) -> T {
        (self.d_dy)(y, t)
    }
}

impl<T> fmt::Debug for MovingBoundary<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("MovingBoundary { .. }")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    One,
    Two,
}

impl Phase {
    /// Field index of the phase's temperature (`u1 -> 0`, `u2 -> 1`).
    pub fn field(self) -> usize {
        match self {
            Phase::One => 0,
            Phase::Two => 1,
        }
    }

    pub fn from_field(field: usize) -> Option<Self> {
        match field {
            0 => Some(Phase::One),
            1 => Some(Phase::Two),
            _ => None,
        }
    }

    pub fn region(self) -> Region {
        match self {
            Phase::One => Region::Phase1,
            Phase::Two => Region::Phase2,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::One => f.write_str("phase1"),
            Phase::Two => f.write_str("phase2"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    Phase1,
    Phase2,
    Interface,
}

impl Region {
    /// Whether a point in this region belongs to the closure of `phase`.
    pub fn touches(self, phase: Phase) -> bool {
        self == Region::Interface || self == phase.region()
    }
}

/// Fixed (non-moving) faces of the spatial box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Face {
    XLo,
    XHi,
    YLo,
    YHi,
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Face::XLo => "x_lo",
            Face::XHi => "x_hi",
            Face::YLo => "y_lo",
            Face::YHi => "y_hi",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SamplingStrategy {
    /// Independent uniform draws from a counter-based stream.
    #[default]
    Random,
    /// Cell-centred tensor grid over the free coordinates, thinned evenly to `n`.
    Grid,
}

/// Where sample coordinates come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub seed: u64,
    pub stream: u64,
    pub strategy: SamplingStrategy,
}

impl Sampling {
    pub fn random(seed: u64) -> Self {
        Self {
            seed,
            stream: 0,
            strategy: SamplingStrategy::Random,
        }
    }

    pub fn grid() -> Self {
        Self {
            seed: 0,
            stream: 0,
            strategy: SamplingStrategy::Grid,
        }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    /// `n` points in the open unit cube of dimension `k`.
    fn unit_points(&self, n: usize, k: usize) -> Vec<Vec<f64>> {
        match self.strategy {
            SamplingStrategy::Random => {
                let mut stream = UniformStream::new(self.seed, self.stream);
                (0..n)
                    .map(|_| (0..k).map(|_| stream.next_open_unit()).collect())
                    .collect()
            }
            SamplingStrategy::Grid => {
                if k == 0 {
                    return vec![Vec::new(); n];
                }
                let mut q = (n as f64).powf(1.0 / k as f64).ceil() as usize;
                while q.pow(k as u32) < n {
                    q += 1;
                }
                let total = q.pow(k as u32);
                (0..n)
                    .map(|j| {
                        let mut idx = j * total / n;
                        let mut u = vec![0.0; k];
                        for slot in u.iter_mut().rev() {
                            *slot = ((idx % q) as f64 + 0.5) / q as f64;
                            idx /= q;
                        }
                        u
                    })
                    .collect()
            }
        }
    }
}

/// A labelled set of space-time points sharing one dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct CollocationSet<T> {
    label: String,
    dim: usize,
    coords: Vec<T>,
}

impl<T: Scalar> CollocationSet<T> {
    pub fn new(label: impl Into<String>, dim: usize, coords: Vec<T>) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: coords.len(),
            });
        }
        Ok(Self {
            label: label.into(),
            dim,
            coords,
        })
    }

    pub fn from_points(label: impl Into<String>, points: &[Vec<T>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: points.iter().map(Vec::len).find(|&l| l != dim).unwrap_or(0),
            });
        }
        Self::new(label, dim, points.concat())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> std::slice::ChunksExact<'_, T> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }
}

/// A domain together with the interface that splits it.
#[derive(Clone, Debug)]
pub struct Geometry<T> {
    domain: SpaceTimeDomain<T>,
    boundary: MovingBoundary<T>,
}

impl<T: Scalar> Geometry<T> {
    /// Validates that `s` stays strictly inside the x-range on a dense sample
    /// of `(y, t)` (1001 times in 1D, 101 x 101 in 2D).
    pub fn new(domain: SpaceTimeDomain<T>, boundary: MovingBoundary<T>) -> Result<Self> {
        let ts = domain
            .t
            .linspace(if domain.y.is_some() { 101 } else { 1001 });
        let ys = domain
            .y
            .map_or_else(|| vec![T::zero()], |y| y.linspace(101));
        for &t in &ts {
            for &y in &ys {
                let s = boundary.s(y, t);
                if !(s.is_finite() && domain.x.lo < s && s < domain.x.hi) {
                    return Err(Error::BoundaryOutsideDomain {
                        y: y.as_f64(),
                        t: t.as_f64(),
                        s: s.as_f64(),
                    });
                }
            }
        }
        Ok(Self { domain, boundary })
    }

    pub fn domain(&self) -> &SpaceTimeDomain<T> {
        &self.domain
    }

    pub fn boundary(&self) -> &MovingBoundary<T> {
        &self.boundary
    }

    pub fn input_dim(&self) -> usize {
        self.domain.input_dim()
    }

    /// `s(y, t)`; `y` must be given exactly when the domain is 2D.
    pub fn interface_position(&self, y: Option<T>, t: T) -> Result<T> {
        self.domain.t.check("t", t)?;
        let y = match (self.domain.y, y) {
            (Some(range), Some(y)) => {
                range.check("y", y)?;
                y
            }
            (None, None) => T::zero(),
            (Some(_), None) => {
                return Err(Error::DimensionMismatch {
                    expected: 3,
                    got: 2,
                })
            }
            (None, Some(_)) => {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    got: 3,
                })
            }
        };
        Ok(self.boundary.s(y, t))
    }

    /// Interface when `|x - s| <= 1e-12 * width(x-range)`.
    pub fn classify(&self, point: &[T]) -> Region {
        let (x, y, t) = self.domain.split(point);
        let s = self.boundary.s(y, t);
        let eps = T::lit(INTERFACE_TOLERANCE) * self.domain.x.width();
        if x < s - eps {
            Region::Phase1
        } else if x > s + eps {
            Region::Phase2
        } else {
            Region::Interface
        }
    }

    /// Maps `rho` in `(0, 1)` across the slab of `phase` at `(y, t)`.
    fn slab_x(&self, phase: Phase, y: T, t: T, rho: T) -> Result<T> {
        let s = self.boundary.s(y, t);
        let (lo, hi) = match phase {
            Phase::One => (self.domain.x.lo, s),
            Phase::Two => (s, self.domain.x.hi),
        };
        if lo.partial_cmp(&hi) != Some(Ordering::Less) {
            return Err(Error::EmptySlab(format!(
                "{phase} at y = {}, t = {}",
                y.as_f64(),
                t.as_f64()
            )));
        }
        Ok(lo + rho * (hi - lo))
    }

    /// Uniform `t` (and `y`), with `x` mapped into the phase slab.
    ///
    /// Per-point draw order: `t`, then `y` in 2D, then the slab fraction.
    pub fn sample_phase_interior(
        &self,
        phase: Phase,
        n: usize,
        sampling: Sampling,
    ) -> Result<CollocationSet<T>> {
        if n == 0 {
            return Err(Error::NoSamples);
        }
        let k = self.input_dim();
        let mut coords = Vec::with_capacity(n * k);
        for u in sampling.unit_points(n, k) {
            let t = self.domain.t.lerp(T::lit(u[0]));
            let y = self.domain.y.map_or(T::zero(), |r| r.lerp(T::lit(u[1])));
            let x = self.slab_x(phase, y, t, T::lit(u[k - 1]))?;
            self.domain.join(x, y, t, &mut coords);
        }
        CollocationSet::new(format!("interior.{phase}"), k, coords)
    }

    /// Points at `t = t_star` in the slab of `phase`.
    pub fn sample_time_slice(
        &self,
        phase: Phase,
        t_star: T,
        n: usize,
        sampling: Sampling,
    ) -> Result<CollocationSet<T>> {
        if n == 0 {
            return Err(Error::NoSamples);
        }
        self.domain.t.check("t_star", t_star)?;
        let k = self.input_dim();
        let mut coords = Vec::with_capacity(n * k);
        for u in sampling.unit_points(n, k - 1) {
            let y = self.domain.y.map_or(T::zero(), |r| r.lerp(T::lit(u[0])));
            let x = self.slab_x(phase, y, t_star, T::lit(u[k - 2]))?;
            self.domain.join(x, y, t_star, &mut coords);
        }
        CollocationSet::new(format!("slice.{phase}"), k, coords)
    }

    /// Points `(s(y, t), y, t)` with `t` (and `y`) uniform.
    pub fn sample_interface(&self, n: usize, sampling: Sampling) -> Result<CollocationSet<T>> {
        if n == 0 {
            return Err(Error::NoSamples);
        }
        let k = self.input_dim();
        let mut coords = Vec::with_capacity(n * k);
        for u in sampling.unit_points(n, k - 1) {
            let t = self.domain.t.lerp(T::lit(u[0]));
            let y = self.domain.y.map_or(T::zero(), |r| r.lerp(T::lit(u[1])));
            self.domain.join(self.boundary.s(y, t), y, t, &mut coords);
        }
        CollocationSet::new("interface", k, coords)
    }

    /// Points on a fixed face, restricted to the part owned by `phase`.
    ///
    /// The `x` faces belong wholly to one phase (`XLo` to phase 1, `XHi` to
    /// phase 2); asking for the other phase is an empty-slab error. On `y`
    /// faces `x` is mapped into the phase slab at that `y`.
    pub fn sample_fixed_boundary(
        &self,
        face: Face,
        phase: Phase,
        n: usize,
        sampling: Sampling,
    ) -> Result<CollocationSet<T>> {
        if n == 0 {
            return Err(Error::NoSamples);
        }
        let k = self.input_dim();
        let y_range = match (face, self.domain.y) {
            (Face::YLo | Face::YHi, None) => {
                return Err(Error::MissingFace {
                    face: face.to_string(),
                    spatial_dim: 1,
                })
            }
            (_, y) => y,
        };
        let owner = match face {
            Face::XLo => Some(Phase::One),
            Face::XHi => Some(Phase::Two),
            Face::YLo | Face::YHi => None,
        };
        if owner.is_some_and(|o| o != phase) {
            return Err(Error::EmptySlab(format!(
                "{phase} does not touch face {face}"
            )));
        }
        let mut coords = Vec::with_capacity(n * k);
        for u in sampling.unit_points(n, k - 1) {
            let t = self.domain.t.lerp(T::lit(u[0]));
            let (x, y) = match face {
                Face::XLo | Face::XHi => {
                    let y = y_range.map_or(T::zero(), |r| r.lerp(T::lit(u[1])));
                    let x = if face == Face::XLo {
                        self.domain.x.lo
                    } else {
                        self.domain.x.hi
                    };
                    (x, y)
                }
                Face::YLo | Face::YHi => {
                    let r = y_range.expect("checked above");
                    let y = if face == Face::YLo { r.lo } else { r.hi };
                    (self.slab_x(phase, y, t, T::lit(u[1]))?, y)
                }
            };
            self.domain.join(x, y, t, &mut coords);
        }
        CollocationSet::new(format!("face.{face}.{phase}"), k, coords)
    }
}
