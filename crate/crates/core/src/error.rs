use thiserror::Error;

/// Errors raised anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),

    #[error("parameter {t} outside domain [{a}, {b}]")]
    Domain { t: f64, a: f64, b: f64 },

    #[error("knot {t} would reach multiplicity {multiplicity} > order {order}")]
    MultiplicityOverflow { t: f64, multiplicity: usize, order: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("coefficient count {got} does not match space dimension {expected}")]
    CoefficientCount { expected: usize, got: usize },

    #[error("singular parametrization at t = {t} (|C'(t)| = {speed:e})")]
    SingularParametrization { t: f64, speed: f64 },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("kernel evaluated at coincident points")]
    Coincident,

    #[error("invalid discrete space: {0}")]
    Space(String),

    #[error("ill-posed problem: {0}")]
    IllPosed(String),

    #[error("factorization breakdown at pivot {pivot} (|d| = {magnitude:e})")]
    Factorization { pivot: usize, magnitude: f64 },

    #[error("{0}")]
    Linear(String),

    #[error("point {0:?} is too close to the boundary")]
    NearBoundary([f64; 2]),

    #[error("invalid error sequence: {0}")]
    ErrorSequence(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("problem file {path}: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
