//! The four benchmark inverse Stefan problems.
//!
//! | id | fields | space | interface `s`            | diffusivities |
//! |----|--------|-------|--------------------------|---------------|
//! | 1  | 1      | 1D    | `2 - sqrt(3 - 2t)`       | 1             |
//! | 2  | 2      | 1D    | `t + 1/2`                | 2, 1          |
//! | 3  | 1      | 2D    | `5t/4 + y/2 + 1/2`       | 1             |
//! | 4  | 2      | 2D    | `t + 1/2`                | 2, 1          |
//!
//! Each case is a declarative roster of linear laws. Right-hand sides are
//! transcribed term by term from the problem data; the closed-form
//! solutions are kept separately so [`verify_case_consistency`] can check
//! one against the other.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::basis::DerivOrder;
use crate::constraints::{apply_to_fields, Coefficient, LinearConstraint, LinearTerm, PointFn};
use crate::error::{Error, Result};
use crate::geometry::{
    CollocationSet, Face, Geometry, Interval, MovingBoundary, Phase, Sampling, SamplingStrategy,
    SpaceTimeDomain,
};
use crate::scalar::to_f64_vec;
use crate::Scalar;

/// Largest residual tolerated when a law is evaluated on the exact fields.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

#[inline]
fn lit<T: Scalar>(v: f64) -> T {
    T::lit(v)
}

/// Which collocation family a law is enforced on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointFamily {
    Interior(Phase),
    /// All points at one time level inside the phase slab.
    TimeSlice {
        phase: Phase,
        t: f64,
    },
    Interface,
    Face {
        face: Face,
        phase: Phase,
    },
}

/// Which configured count sizes a family: `N_C` or `N_I`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointBudget {
    Collocation,
    Initial,
}

#[derive(Clone, Debug)]
pub struct LawSpec<T> {
    pub label: String,
    pub terms: Vec<LinearTerm<T>>,
    pub rhs: Coefficient<T>,
    pub family: PointFamily,
    pub budget: PointBudget,
}

/// Closed-form temperature fields with exact partial derivatives.
#[derive(Clone, Debug, PartialEq)]
pub enum ExactField<T> {
    /// `amplitude * exp(rates . p + offset) + shift`
    Exponential {
        amplitude: T,
        rates: Vec<T>,
        offset: T,
        shift: T,
    },
    /// `xx x^2 + x_lin x + constant + t_lin t` on `(x, t)` points.
    Quadratic {
        xx: T,
        x_lin: T,
        constant: T,
        t_lin: T,
    },
}

impl<T: Scalar> ExactField<T> {
    pub fn derivative(&self, order: DerivOrder, point: &[T]) -> T {
        match self {
            ExactField::Exponential {
                amplitude,
                rates,
                offset,
                shift,
            } => {
                let exponent = rates
                    .iter()
                    .zip(point)
                    .fold(*offset, |acc, (&r, &p)| acc + r * p);
                let e = *amplitude * exponent.exp();
                if order.total() == 0 {
                    return e + *shift;
                }
                order
                    .orders()
                    .iter()
                    .zip(rates)
                    .fold(e, |acc, (&a, &r)| match a {
                        0 => acc,
                        1 => acc * r,
                        _ => acc * r * r,
                    })
            }
            ExactField::Quadratic {
                xx,
                x_lin,
                constant,
                t_lin,
            } => {
                let (x, t) = (point[0], point[1]);
                match order.orders() {
                    [0, 0] => *xx * x * x + *x_lin * x + *constant + *t_lin * t,
                    [1, 0] => lit::<T>(2.0) * *xx * x + *x_lin,
                    [2, 0] => lit::<T>(2.0) * *xx,
                    [0, 1] => *t_lin,
                    _ => T::zero(),
                }
            }
        }
    }
}

/// A reconstructed boundary quantity: `D^order u_field` on a fixed face.
#[derive(Clone)]
pub struct TraceTarget<T> {
    pub name: String,
    pub field: usize,
    pub order: DerivOrder,
    pub face: Face,
    /// The boundary formula as stated with the problem.
    pub exact: PointFn<T>,
}

impl<T> std::fmt::Debug for TraceTarget<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TraceTarget")
            .field("name", &self.name)
            .field("field", &self.field)
            .field("order", &self.order)
            .field("face", &self.face)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CaseOptions {
    /// Adds the fixed-boundary flux `u_x(0, t) = 2` to case 1.
    pub include_fixed_neumann: bool,
}

/// How many points each law family receives and where they come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplingPlan {
    pub n_collocation: usize,
    pub n_initial: usize,
    pub seed: u64,
    pub strategy: SamplingStrategy,
}

#[derive(Clone, Debug)]
pub struct CaseDefinition<T> {
    pub id: u8,
    pub name: &'static str,
    pub diffusivities: Vec<T>,
    pub geometry: Geometry<T>,
    pub laws: Vec<LawSpec<T>>,
    pub exact_fields: Vec<ExactField<T>>,
    pub targets: Vec<TraceTarget<T>>,
    pub interface_temperature: T,
}

impl<T: Scalar> CaseDefinition<T> {
    pub fn field_count(&self) -> usize {
        self.exact_fields.len()
    }

    pub fn input_dim(&self) -> usize {
        self.geometry.input_dim()
    }

    pub fn spatial_dim(&self) -> usize {
        self.geometry.domain().spatial_dim()
    }

    pub fn phase_of_field(&self, field: usize) -> Result<Phase> {
        if field >= self.field_count() {
            return Err(Error::UnknownField {
                field,
                field_count: self.field_count(),
            });
        }
        Ok(Phase::from_field(field).expect("at most two fields"))
    }

    pub fn target(&self, name: &str) -> Result<&TraceTarget<T>> {
        self.targets
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::UnknownTarget(name.to_string()))
    }

    /// Exact derivative of a field, without checking the phase.
    pub fn exact_derivative(&self, field: usize, order: DerivOrder, point: &[T]) -> T {
        self.exact_fields[field].derivative(order, point)
    }

    /// Exact temperature of `field` at a point in the closure of its phase.
    pub fn exact_solution(&self, field: usize, point: &[T]) -> Result<T> {
        let phase = self.phase_of_field(field)?;
        if point.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                got: point.len(),
            });
        }
        if !self.geometry.classify(point).touches(phase) {
            return Err(Error::WrongPhase {
                field,
                point: to_f64_vec(point),
            });
        }
        Ok(self.exact_derivative(field, DerivOrder::zero(point.len()), point))
    }

    fn sample_family(
        &self,
        family: PointFamily,
        n: usize,
        sampling: Sampling,
    ) -> Result<CollocationSet<T>> {
        let g = &self.geometry;
        match family {
            PointFamily::Interior(phase) => g.sample_phase_interior(phase, n, sampling),
            PointFamily::TimeSlice { phase, t } => g.sample_time_slice(phase, lit(t), n, sampling),
            PointFamily::Interface => g.sample_interface(n, sampling),
            PointFamily::Face { face, phase } => g.sample_fixed_boundary(face, phase, n, sampling),
        }
    }

    /// Samples every law's points and returns the constraint list.
    ///
    /// Laws on the same family and budget share one point set. Distinct
    /// sets use streams `1, 2, ...` of the plan's seed in roster order
    /// (stream 0 is reserved for the hidden layer).
    pub fn build_constraints(&self, plan: &SamplingPlan) -> Result<Vec<LinearConstraint<T>>> {
        let mut cache: Vec<(PointFamily, PointBudget, CollocationSet<T>)> = Vec::new();
        let mut out = Vec::with_capacity(self.laws.len());
        for law in &self.laws {
            let points = match cache
                .iter()
                .find(|(f, b, _)| *f == law.family && *b == law.budget)
            {
                Some((_, _, set)) => set.clone(),
                None => {
                    let n = match law.budget {
                        PointBudget::Collocation => plan.n_collocation,
                        PointBudget::Initial => plan.n_initial,
                    };
                    let sampling = Sampling {
                        seed: plan.seed,
                        stream: cache.len() as u64 + 1,
                        strategy: plan.strategy,
                    };
                    let set = self.sample_family(law.family, n, sampling)?;
                    cache.push((law.family, law.budget, set.clone()));
                    set
                }
            };
            out.push(LinearConstraint::new(
                law.label.clone(),
                law.terms.clone(),
                law.rhs.clone(),
                points.with_label(law.label.clone()),
            )?);
        }
        Ok(out)
    }
}

/// Evaluates every law and every trace formula on the exact fields and
/// returns the largest absolute residual.
pub fn verify_case_consistency<T: Scalar>(
    case: &CaseDefinition<T>,
    samples_per_law: usize,
) -> Result<T> {
    let plan = SamplingPlan {
        n_collocation: samples_per_law,
        n_initial: samples_per_law,
        seed: 0x5eed,
        strategy: SamplingStrategy::Random,
    };
    let tolerance = lit::<T>(CONSISTENCY_TOLERANCE);
    let oracle = |field: usize, order: DerivOrder, p: &[T]| case.exact_derivative(field, order, p);
    let mut worst = T::zero();
    let mut check = |label: &str, value: T| -> Result<()> {
        let r = value.abs();
        if r.partial_cmp(&tolerance).is_none_or(Ordering::is_gt) {
            return Err(Error::Inconsistent {
                label: label.to_string(),
                residual: r.as_f64(),
                tolerance: CONSISTENCY_TOLERANCE,
            });
        }
        worst = worst.max(r);
        Ok(())
    };

    for c in case.build_constraints(&plan)? {
        for p in c.points.points() {
            check(&c.label, apply_to_fields(&c, &oracle, p))?;
        }
    }

    for target in &case.targets {
        let phase = case.phase_of_field(target.field)?;
        let set = case.geometry.sample_fixed_boundary(
            target.face,
            phase,
            samples_per_law,
            Sampling::random(plan.seed).with_stream(1000),
        )?;
        for p in set.points() {
            let exact = case.exact_derivative(target.field, target.order, p);
            check(
                &format!("target {}", target.name),
                exact - (target.exact)(p),
            )?;
        }
    }

    // Both phases meet at the interface temperature.
    let interface = case.geometry.sample_interface(
        samples_per_law,
        Sampling::random(plan.seed).with_stream(1001),
    )?;
    for p in interface.points() {
        for field in 0..case.field_count() {
            let u = case.exact_derivative(field, DerivOrder::zero(p.len()), p);
            check("interface temperature", u - case.interface_temperature)?;
        }
    }
    Ok(worst)
}

fn heat_law<T: Scalar>(label: &str, field: usize, k: f64, dim: usize, phase: Phase) -> LawSpec<T> {
    let mut terms = vec![
        LinearTerm::constant(field, DerivOrder::dt(dim), T::one()),
        LinearTerm::constant(field, DerivOrder::dxx(dim), lit(-k)),
    ];
    if dim == 3 {
        terms.push(LinearTerm::constant(field, DerivOrder::dyy(dim), lit(-k)));
    }
    LawSpec {
        label: label.to_string(),
        terms,
        rhs: Coefficient::Const(T::zero()),
        family: PointFamily::Interior(phase),
        budget: PointBudget::Collocation,
    }
}

fn value_law<T: Scalar>(
    label: &str,
    field: usize,
    dim: usize,
    family: PointFamily,
    budget: PointBudget,
    rhs: impl Fn(&[T]) -> T + Send + Sync + 'static,
) -> LawSpec<T> {
    LawSpec {
        label: label.to_string(),
        terms: vec![LinearTerm::constant(field, DerivOrder::zero(dim), T::one())],
        rhs: Coefficient::func(rhs),
        family,
        budget,
    }
}

fn interface_value_law<T: Scalar>(label: &str, field: usize, dim: usize, u_s: T) -> LawSpec<T> {
    LawSpec {
        label: label.to_string(),
        terms: vec![LinearTerm::constant(field, DerivOrder::zero(dim), T::one())],
        rhs: Coefficient::Const(u_s),
        family: PointFamily::Interface,
        budget: PointBudget::Collocation,
    }
}

fn target<T: Scalar>(
    name: &str,
    field: usize,
    order: DerivOrder,
    face: Face,
    exact: impl Fn(&[T]) -> T + Send + Sync + 'static,
) -> TraceTarget<T> {
    TraceTarget {
        name: name.to_string(),
        field,
        order,
        face,
        exact: Arc::new(exact),
    }
}

fn unit_time<T: Scalar>() -> Interval<T> {
    Interval::new(T::zero(), T::one()).expect("valid")
}

/// One-phase 1D problem with `s(t) = 2 - sqrt(3 - 2t)`.
pub fn case1<T: Scalar>(options: CaseOptions) -> CaseDefinition<T> {
    let d = 2;
    let domain = SpaceTimeDomain::one_d(
        Interval::new(T::zero(), lit(1.25)).expect("valid"),
        unit_time(),
    );
    let boundary = MovingBoundary::one_d(
        |t: T| lit::<T>(2.0) - (lit::<T>(3.0) - lit::<T>(2.0) * t).sqrt(),
        |t: T| T::one() / (lit::<T>(3.0) - lit::<T>(2.0) * t).sqrt(),
    );
    let geometry = Geometry::new(domain, boundary).expect("s(t) stays inside [0, 1.25]");
    let u_s = T::zero();

    let mut laws = vec![
        heat_law("pde", 0, 1.0, d, Phase::One),
        value_law(
            "initial",
            0,
            d,
            PointFamily::TimeSlice {
                phase: Phase::One,
                t: 0.0,
            },
            PointBudget::Initial,
            |p: &[T]| -p[0] * p[0] / lit(2.0) + lit::<T>(2.0) * p[0] - lit(0.5),
        ),
        interface_value_law("interface.dirichlet", 0, d, u_s),
        LawSpec {
            label: "interface.neumann".into(),
            terms: vec![LinearTerm::constant(0, DerivOrder::dx(d), T::one())],
            rhs: Coefficient::func(|p: &[T]| (lit::<T>(3.0) - lit::<T>(2.0) * p[1]).sqrt()),
            family: PointFamily::Interface,
            budget: PointBudget::Collocation,
        },
    ];
    if options.include_fixed_neumann {
        laws.push(LawSpec {
            label: "fixed.neumann".into(),
            terms: vec![LinearTerm::constant(0, DerivOrder::dx(d), T::one())],
            rhs: Coefficient::Const(lit(2.0)),
            family: PointFamily::Face {
                face: Face::XLo,
                phase: Phase::One,
            },
            budget: PointBudget::Initial,
        });
    }

    CaseDefinition {
        id: 1,
        name: "one-dimensional one-phase",
        diffusivities: vec![T::one()],
        geometry,
        laws,
        exact_fields: vec![ExactField::Quadratic {
            xx: lit(-0.5),
            x_lin: lit(2.0),
            constant: lit(-0.5),
            t_lin: lit(-1.0),
        }],
        targets: vec![
            target("u(0,t)", 0, DerivOrder::zero(d), Face::XLo, |p: &[T]| {
                lit::<T>(-0.5) - p[1]
            }),
            target("u_x(0,t)", 0, DerivOrder::dx(d), Face::XLo, |_: &[T]| {
                lit(2.0)
            }),
        ],
        interface_temperature: u_s,
    }
}

/// Two-phase 1D problem on `[0, 2]` with `s(t) = t + 1/2`.
pub fn case2<T: Scalar>() -> CaseDefinition<T> {
    let d = 2;
    let domain = SpaceTimeDomain::one_d(
        Interval::new(T::zero(), lit(2.0)).expect("valid"),
        unit_time(),
    );
    let boundary = MovingBoundary::one_d(|t: T| t + lit(0.5), |_| T::one());
    let geometry = Geometry::new(domain, boundary).expect("s(t) stays inside [0, 2]");
    let u_s = T::zero();
    let slice = |phase, t| PointFamily::TimeSlice { phase, t };

    let laws = vec![
        heat_law("pde.phase1", 0, 2.0, d, Phase::One),
        heat_law("pde.phase2", 1, 1.0, d, Phase::Two),
        value_law(
            "initial.phase1",
            0,
            d,
            slice(Phase::One, 0.0),
            PointBudget::Initial,
            |p: &[T]| {
                lit::<T>(2.0) * ((T::one() - lit::<T>(2.0) * p[0]) / lit(4.0)).exp() - lit(2.0)
            },
        ),
        value_law(
            "initial.phase2",
            1,
            d,
            slice(Phase::Two, 0.0),
            PointBudget::Initial,
            |p: &[T]| ((T::one() - lit::<T>(2.0) * p[0]) / lit(2.0)).exp() - T::one(),
        ),
        value_law(
            "final.phase1",
            0,
            d,
            slice(Phase::One, 1.0),
            PointBudget::Initial,
            |p: &[T]| {
                lit::<T>(2.0) * ((lit::<T>(3.0) - lit::<T>(2.0) * p[0]) / lit(4.0)).exp() - lit(2.0)
            },
        ),
        value_law(
            "final.phase2",
            1,
            d,
            slice(Phase::Two, 1.0),
            PointBudget::Initial,
            |p: &[T]| (lit::<T>(1.5) - p[0]).exp() - T::one(),
        ),
        interface_value_law("interface.dirichlet.phase1", 0, d, u_s),
        interface_value_law("interface.dirichlet.phase2", 1, d, u_s),
        LawSpec {
            label: "interface.stefan".into(),
            terms: vec![
                LinearTerm::constant(0, DerivOrder::dx(d), lit(-2.0)),
                LinearTerm::constant(1, DerivOrder::dx(d), T::one()),
            ],
            rhs: Coefficient::Const(T::one()),
            family: PointFamily::Interface,
            budget: PointBudget::Collocation,
        },
    ];

    CaseDefinition {
        id: 2,
        name: "one-dimensional two-phase",
        diffusivities: vec![lit(2.0), T::one()],
        geometry,
        laws,
        exact_fields: vec![
            ExactField::Exponential {
                amplitude: lit(2.0),
                rates: vec![lit(-0.5), lit(0.5)],
                offset: lit(0.25),
                shift: lit(-2.0),
            },
            ExactField::Exponential {
                amplitude: T::one(),
                rates: vec![lit(-1.0), T::one()],
                offset: lit(0.5),
                shift: lit(-1.0),
            },
        ],
        targets: vec![
            target("u1(0,t)", 0, DerivOrder::zero(d), Face::XLo, |p: &[T]| {
                lit::<T>(2.0) * ((lit::<T>(2.0) * p[1] + T::one()) / lit(4.0)).exp() - lit(2.0)
            }),
            target("u2(2,t)", 1, DerivOrder::zero(d), Face::XHi, |p: &[T]| {
                ((lit::<T>(2.0) * p[1] - lit(3.0)) / lit(2.0)).exp() - T::one()
            }),
        ],
        interface_temperature: u_s,
    }
}

/// One-phase 2D problem with `s(y, t) = 5t/4 + y/2 + 1/2`.
pub fn case3<T: Scalar>() -> CaseDefinition<T> {
    let d = 3;
    let domain = SpaceTimeDomain::two_d(
        Interval::new(T::zero(), lit(2.5)).expect("valid"),
        unit_time(),
        unit_time(),
    );
    let boundary = MovingBoundary::new(
        Arc::new(|y: T, t: T| lit::<T>(1.25) * t + lit::<T>(0.5) * y + lit(0.5)),
        Arc::new(|_, _| lit(1.25)),
        Arc::new(|_, _| lit(0.5)),
    );
    let geometry = Geometry::new(domain, boundary).expect("s(y, t) stays inside [0, 2.5]");
    let u_s = T::zero();

    let laws = vec![
        heat_law("pde", 0, 1.0, d, Phase::One),
        value_law(
            "initial",
            0,
            d,
            PointFamily::TimeSlice {
                phase: Phase::One,
                t: 0.0,
            },
            PointBudget::Initial,
            |p: &[T]| (-p[0] + lit::<T>(0.5) * p[1] + lit(0.5)).exp() - T::one(),
        ),
        value_law(
            "final",
            0,
            d,
            PointFamily::TimeSlice {
                phase: Phase::One,
                t: 1.0,
            },
            PointBudget::Initial,
            |p: &[T]| (-p[0] + lit::<T>(0.5) * p[1] + lit(1.75)).exp() - T::one(),
        ),
        interface_value_law("interface.dirichlet", 0, d, u_s),
        LawSpec {
            label: "interface.flux".into(),
            terms: vec![
                LinearTerm::constant(0, DerivOrder::dx(d), T::one()),
                LinearTerm::constant(0, DerivOrder::dy(d), lit(-0.5)),
            ],
            rhs: Coefficient::Const(lit(-1.25)),
            family: PointFamily::Interface,
            budget: PointBudget::Collocation,
        },
    ];

    CaseDefinition {
        id: 3,
        name: "two-dimensional one-phase",
        diffusivities: vec![T::one()],
        geometry,
        laws,
        exact_fields: vec![ExactField::Exponential {
            amplitude: T::one(),
            rates: vec![lit(-1.0), lit(0.5), lit(1.25)],
            offset: lit(0.5),
            shift: lit(-1.0),
        }],
        targets: vec![
            target(
                "u(x,0,t)",
                0,
                DerivOrder::zero(d),
                Face::YLo,
                |p: &[T]| (lit::<T>(1.25) * p[2] - p[0] + lit(0.5)).exp() - T::one(),
            ),
            target(
                "u(x,1,t)",
                0,
                DerivOrder::zero(d),
                Face::YHi,
                |p: &[T]| (lit::<T>(1.25) * p[2] - p[0] + T::one()).exp() - T::one(),
            ),
            target(
                "u(0,y,t)",
                0,
                DerivOrder::zero(d),
                Face::XLo,
                |p: &[T]| {
                    (lit::<T>(1.25) * p[2] + lit::<T>(0.5) * p[1] + lit(0.5)).exp() - T::one()
                },
            ),
        ],
        interface_temperature: u_s,
    }
}

/// Two-phase 2D problem on `[0, 2] x [0, 1]` with `s(y, t) = t + 1/2`.
pub fn case4<T: Scalar>() -> CaseDefinition<T> {
    let d = 3;
    let domain = SpaceTimeDomain::two_d(
        Interval::new(T::zero(), lit(2.0)).expect("valid"),
        unit_time(),
        unit_time(),
    );
    let boundary = MovingBoundary::new(
        Arc::new(|_, t: T| t + lit(0.5)),
        Arc::new(|_, _| T::one()),
        Arc::new(|_, _| T::zero()),
    );
    // The interface starts flat at x = 1/2.
    for y in Interval::<T>::new(T::zero(), T::one())
        .expect("valid")
        .linspace(101)
    {
        assert!(
            boundary.s(y, T::zero()) == lit(0.5),
            "s(y, 0) must equal 1/2"
        );
    }
    let geometry = Geometry::new(domain, boundary.clone()).expect("s(y, t) stays inside [0, 2]");
    let u_s = T::zero();
    let slice = |phase| PointFamily::TimeSlice { phase, t: 0.0 };
    let face = |face, phase| PointFamily::Face { face, phase };
    let u1 = |p: &[T]| {
        lit::<T>(2.0) * ((lit::<T>(2.0) * p[2] - lit::<T>(2.0) * p[0] + T::one()) / lit(4.0)).exp()
            - lit(2.0)
    };
    let u2 = |p: &[T]| {
        ((lit::<T>(2.0) * p[2] - lit::<T>(2.0) * p[0] + T::one()) / lit(2.0)).exp() - T::one()
    };
    let (by1, by2, bt) = (boundary.clone(), boundary.clone(), boundary);

    let laws = vec![
        heat_law("pde.phase1", 0, 2.0, d, Phase::One),
        heat_law("pde.phase2", 1, 1.0, d, Phase::Two),
        value_law(
            "initial.phase1",
            0,
            d,
            slice(Phase::One),
            PointBudget::Initial,
            |p: &[T]| {
                lit::<T>(2.0) * ((T::one() - lit::<T>(2.0) * p[0]) / lit(4.0)).exp() - lit(2.0)
            },
        ),
        value_law(
            "initial.phase2",
            1,
            d,
            slice(Phase::Two),
            PointBudget::Initial,
            |p: &[T]| ((T::one() - lit::<T>(2.0) * p[0]) / lit(2.0)).exp() - T::one(),
        ),
        value_law(
            "face.x_lo.phase1",
            0,
            d,
            face(Face::XLo, Phase::One),
            PointBudget::Initial,
            |p: &[T]| {
                lit::<T>(2.0) * ((lit::<T>(2.0) * p[2] + T::one()) / lit(4.0)).exp() - lit(2.0)
            },
        ),
        value_law(
            "face.x_hi.phase2",
            1,
            d,
            face(Face::XHi, Phase::Two),
            PointBudget::Initial,
            |p: &[T]| ((lit::<T>(2.0) * p[2] - lit(3.0)) / lit(2.0)).exp() - T::one(),
        ),
        value_law(
            "face.y_lo.phase1",
            0,
            d,
            face(Face::YLo, Phase::One),
            PointBudget::Initial,
            u1,
        ),
        value_law(
            "face.y_lo.phase2",
            1,
            d,
            face(Face::YLo, Phase::Two),
            PointBudget::Initial,
            u2,
        ),
        value_law(
            "face.y_hi.phase1",
            0,
            d,
            face(Face::YHi, Phase::One),
            PointBudget::Initial,
            u1,
        ),
        value_law(
            "face.y_hi.phase2",
            1,
            d,
            face(Face::YHi, Phase::Two),
            PointBudget::Initial,
            u2,
        ),
        interface_value_law("interface.dirichlet.phase1", 0, d, u_s),
        interface_value_law("interface.dirichlet.phase2", 1, d, u_s),
        // -2 (u1_x - u1_y s_y) + (u2_x - u2_y s_y) - s_t = 0
        LawSpec {
            label: "interface.stefan".into(),
            terms: vec![
                LinearTerm::constant(0, DerivOrder::dx(d), lit(-2.0)),
                LinearTerm::varying(0, DerivOrder::dy(d), move |p: &[T]| {
                    lit::<T>(2.0) * by1.ds_dy(p[1], p[2])
                }),
                LinearTerm::constant(1, DerivOrder::dx(d), T::one()),
                LinearTerm::varying(1, DerivOrder::dy(d), move |p: &[T]| -by2.ds_dy(p[1], p[2])),
            ],
            rhs: Coefficient::func(move |p: &[T]| bt.ds_dt(p[1], p[2])),
            family: PointFamily::Interface,
            budget: PointBudget::Collocation,
        },
    ];

    CaseDefinition {
        id: 4,
        name: "two-dimensional two-phase",
        diffusivities: vec![lit(2.0), T::one()],
        geometry,
        laws,
        exact_fields: vec![
            ExactField::Exponential {
                amplitude: lit(2.0),
                rates: vec![lit(-0.5), T::zero(), lit(0.5)],
                offset: lit(0.25),
                shift: lit(-2.0),
            },
            ExactField::Exponential {
                amplitude: T::one(),
                rates: vec![lit(-1.0), T::zero(), T::one()],
                offset: lit(0.5),
                shift: lit(-1.0),
            },
        ],
        targets: Vec::new(),
        interface_temperature: u_s,
    }
}

/// Looks a case up by its public id (1 to 4).
pub fn case_by_id<T: Scalar>(id: u8, options: CaseOptions) -> Result<CaseDefinition<T>> {
    match id {
        1 => Ok(case1(options)),
        2 => Ok(case2()),
        3 => Ok(case3()),
        4 => Ok(case4()),
        other => Err(Error::UnknownCase(other)),
    }
}

/// Checks that a point is inside the closure of the phase that owns `field`.
pub(crate) fn in_field_region<T: Scalar>(
    case: &CaseDefinition<T>,
    field: usize,
    point: &[T],
) -> bool {
    match Phase::from_field(field) {
        Some(phase) => case.geometry.classify(point).touches(phase),
        None => false,
    }
}
