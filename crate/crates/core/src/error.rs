use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid point count {0} must be a power of two and at least 8")]
    GridSize(usize),
    #[error("half-width must be positive and finite, got {0}")]
    GridHalfWidth(f64),
    #[error("alpha must be in (1/3, 2], got {0}")]
    Alpha(f64),
    #[error("sigma must be -1 or +1, got {0}")]
    Sigma(f64),
    #[error("wave speed c must be positive, got {0}")]
    Speed(f64),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("length mismatch: expected {expected}, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("field has nonzero x-mean (relative {0:e}); antiderivative undefined")]
    NonzeroMean(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("iteration did not converge after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },
    #[error("iteration diverged: sup norm {0:e}")]
    Divergence(f64),
    #[error("profile does not decay on this grid: |Q(±L)| = {0:e} exceeds 1e-4")]
    BoundaryNotSmall(f64),
    #[error("tail window reaches the precision floor ({0:e}); enlarge the grid or shrink the window")]
    TailFloor(f64),
    #[error("non-finite solution at t = {t}; last finite sample at t = {last_finite_t}")]
    BlowUp { t: f64, last_finite_t: f64 },
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("no negative eigenvalue found")]
    NoNegativeEigenvalue,
    #[error("singular Jacobian in Newton correction")]
    SingularJacobian,
    #[error("continuation step fell below minimal size at s = {0:e}")]
    ContinuationStall(f64),
    #[error("empty series")]
    EmptySeries,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
