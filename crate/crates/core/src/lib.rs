//! Physics-informed extreme learning machine for inverse Stefan problems.
//!
//! When the moving interface `x = s(y, t)` is prescribed, the heat equations
//! in both phases, the initial and boundary data and the interface
//! conditions are all linear in the temperature. Representing each field
//! as `u_j = H(x, t) theta_j`, with `H` a fixed random `tanh` layer, turns the
//! whole inverse problem into one dense least-squares system for the output
//! weights.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the double-precision types used by the benchmarks.

pub mod basis;
pub mod cases;
pub mod constraints;
pub mod derivative_check;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod lstsq;
pub mod pipeline;
pub mod rng;
pub mod scalar;

pub use basis::{Activation, DerivOrder, ElmBasis, InputScaling};
pub use cases::{case_by_id, verify_case_consistency, CaseDefinition, CaseOptions};
pub use error::{Error, Result};
pub use evaluation::{boundary_trace, evaluate_field, relative_l2, robustness_trial, TrialStats};
pub use lstsq::{condition_report, solve_min_norm, SolveDiagnostics};
pub use pipeline::{solve_case, PielmConfig, Solution};
pub use scalar::Scalar;

pub type Basis = ElmBasis<f64>;
pub type Case = CaseDefinition<f64>;
pub type Config = PielmConfig<f64>;
pub type SolutionF64 = Solution<f64>;
pub type Stats = TrialStats<f64>;
