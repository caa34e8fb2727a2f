use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input dimension {0} is not supported (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("neuron count must be at least 1")]
    NoNeurons,

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("derivative order {0:?} is unsupported (each order <= 2, total <= 2)")]
    UnsupportedOrder(Vec<u8>),

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("moving boundary s = {s} at (y = {y}, t = {t}) is not strictly inside the x-range")]
    BoundaryOutsideDomain { y: f64, t: f64, s: f64 },

    #[error("phase slab is empty: {0}")]
    EmptySlab(String),

    #[error("face {face} does not exist in a {spatial_dim}D domain")]
    MissingFace { face: String, spatial_dim: usize },

    #[error("sample count must be at least 1")]
    NoSamples,

    #[error("constraint `{label}` is invalid: {reason}")]
    InvalidConstraint { label: String, reason: String },

    #[error("constraint `{label}`: non-finite {what} at point {point:?}")]
    NonFinite {
        label: String,
        what: &'static str,
        point: Vec<f64>,
    },

    #[error("row scale given for `{0}`, which is not a law of this case")]
    UnknownLabel(String),

    #[error("no constraints to assemble")]
    EmptySystem,

    #[error("vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("matrix or right-hand side contains non-finite entries")]
    NonFiniteInput,

    #[error("rcond must lie in (0, 1), got {0}")]
    InvalidRcond(f64),

    #[error("singular value decomposition did not converge")]
    NoConvergence,

    #[error(
        "law `{label}` disagrees with the exact solution: residual {residual:e} > {tolerance:e}"
    )]
    Inconsistent {
        label: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("point {point:?} is outside the phase of field {field}")]
    WrongPhase { field: usize, point: Vec<f64> },

    #[error("field index {field} out of range for a {field_count}-field case")]
    UnknownField { field: usize, field_count: usize },

    #[error("unknown prediction target `{0}`")]
    UnknownTarget(String),

    #[error("relative L2 error is undefined: exact values have zero norm")]
    ZeroNorm,

    #[error("evaluation grid is empty: {0}")]
    EmptyGrid(String),

    #[error("at least {required} seeds are required, got {got}")]
    TooFewSeeds { required: usize, got: usize },

    #[error("unknown case id {0} (expected 1 to 4)")]
    UnknownCase(u8),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
