use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(&'static str),

    #[error("singular matrix (|det| = {0:e})")]
    Singular(f64),

    #[error("basis Gram matrix condition number {0:e} exceeds 1e12; reduce N")]
    Conditioning(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("argument {0} outside the series validity domain |zeta| <= 40")]
    DomainExceeded(f64),

    #[error("root lies on or too close to the integration contour (distance {0:e})")]
    RootOnContour(f64),

    #[error("eigenvalue iteration did not converge after {iterations} sweeps ({found} of {total} eigenvalues found)")]
    NoConvergence {
        iterations: usize,
        found: usize,
        total: usize,
    },

    #[error("subdivision depth exceeded for cell [{re_min}, {re_max}] x [{im_min}, {im_max}]")]
    MaxDepthExceeded {
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
    },

    #[error("winding number did not settle to an integer (got {0})")]
    NonIntegerWinding(f64),

    #[error("degenerate fit: need at least 3 samples, got {0}")]
    DegenerateFit(usize),
}
