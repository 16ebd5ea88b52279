use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the crate. Numeric routines are
/// deterministic, so every variant corresponds to a rejected input or an
/// algorithm that signalled it could not meet its contract.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rotation angle {value} at index {index} must lie strictly inside (0, 1)")]
    InvalidAngle { index: usize, value: f64 },

    #[error("point coordinate {value} at index {index} must lie in [0, 1)")]
    InvalidPoint { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("input must not be empty")]
    EmptyInput,

    #[error("field value {value} at index {index} is outside [0, 1] (corrupt table)")]
    FieldValueOutOfRange { index: usize, value: f64 },

    #[error("field parameter {name} = {value} is outside its admissible range")]
    InvalidFieldParameter { name: &'static str, value: f64 },

    #[error("declared integral {declared} disagrees with quadrature {computed} beyond tolerance")]
    IntegralMismatch { declared: f64, computed: f64 },

    #[error("schedule must be strictly increasing and start at n >= 1")]
    InvalidSchedule,

    #[error("continued fraction of a float input is precision-exhausted after {terms} terms (convergent denominator beyond the float horizon)")]
    PrecisionExhausted { terms: usize },

    #[error("{0} is a perfect square; the quadratic surd would be rational")]
    PerfectSquare(u64),

    #[error("invalid quadratic surd: {reason}")]
    InvalidSurd { reason: &'static str },

    #[error("denominator must be nonzero")]
    ZeroDenominator,

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("requested depth {depth} must be at least 1")]
    InvalidDepth { depth: usize },

    #[error("grid evaluation needs {needed} cells, above the configured cap {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },

    #[error(
        "star discrepancy in dimension 1 has an exact method; the grid estimate requires r >= 2"
    )]
    GridNeedsHigherDimension,

    #[error(
        "no Erdős-Turán-Koksma constant is built in for dimension {dim}; supply one explicitly"
    )]
    MissingEtkConstant { dim: usize },

    #[error("projection {subset:?} carries variation but no discrepancy value was supplied")]
    MissingProjection { subset: Vec<usize> },

    #[error("convergent index {index} is out of range (only {available} computed)")]
    ConvergentOutOfRange { index: usize, available: usize },

    #[error("quadrature failed to reach the requested tolerance (estimated error {error:.3e})")]
    QuadratureNonConvergence { error: f64 },

    #[error("atom weights sum to {sum}, not 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("atom location {value} is outside [0, 1]")]
    AtomOutOfRange { value: f64 },

    #[error("field distribution is degenerate for this operation: {reason}")]
    DegenerateDistribution { reason: &'static str },

    #[error("no derivative of order <= {max_order} at s = {location} exceeds the classification tolerance")]
    ClassificationFailure { location: f64, max_order: usize },

    #[error("critical point at s = {location} has first significant derivative of odd order {order}; not a clean minimum")]
    OddOrderCriticalPoint { location: f64, order: usize },

    #[error("beta = {beta} is not above the critical inverse temperature {beta_c}; no spontaneous magnetization")]
    NotSupercritical { beta: f64, beta_c: f64 },

    #[error("no positive root of the magnetization equation was found")]
    NoPositiveRoot,

    #[error("z = {z} is outside the open interval (-1, 1)")]
    BoundaryZ { z: f64 },

    #[error("the cumulant generating function is affine (all field mass on {{0, 1}}); the transform degenerates")]
    FlatLambda,

    #[error(
        "model parameters must satisfy beta > 0 and J > 0 (got beta = {beta}, j = {coupling})"
    )]
    InvalidParams { beta: f64, coupling: f64 },

    #[error("law cache: {reason}")]
    CacheFormat { reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
