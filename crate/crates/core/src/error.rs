use thiserror::Error;

/// Crate-wide error type. Variants carry machine-readable reason codes so
/// the CLI can map them onto exit statuses and JSON reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("point is not in the set")]
    PointNotInSet,
    #[error("point is not adherent to both sets")]
    NotAdherent,
    #[error("conic subset has no exact pieces: result would be an estimate only")]
    EstimateOnly,
    #[error("cone is not proper: {0}")]
    NotProper(String),
    #[error("vector is not in the required interior: {0}")]
    NotInterior(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("inconsistent parameters: {0}")]
    ParameterInconsistency(String),
    #[error("objective is unbounded below on the window")]
    UnboundedBelow,
    #[error("set is unbounded")]
    Unbounded,
    #[error("affine map has a non-injective linear part")]
    NonInjective,
    #[error("scalar field is not differentiable at the evaluation point")]
    NonDifferentiable,
    #[error("division by zero while evaluating a scalar field")]
    DivisionByZero,
    #[error("expression parse error: {0}")]
    Parse(String),
    #[error("local cohomology did not stabilize over the radius pair; shrink radius")]
    Unstable,
    #[error("pruning set is not low-dimensional: {0}")]
    NotLowDimensional(String),
    #[error("stratified description is malformed: {0}")]
    BadStrata(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
