use thiserror::Error;

/// Errors surfaced by the spectral toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 1, 2 or 3, got {0}")]
    DimensionOutOfRange(usize),
    #[error("points per axis must be a power of two >= 16, got {0}")]
    BadPointCount(usize),
    #[error("half width must be positive, got {0}")]
    BadHalfWidth(f64),
    #[error("field length {got} does not match grid point count {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("field contains a non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("{name} must be positive, got {value}")]
    NonPositiveParam { name: &'static str, value: f64 },
    #[error("omega = {omega} is inadmissible; need omega > max(-1, -mu/(3 sigma)) = {bound}")]
    InadmissibleOmega { omega: f64, bound: f64 },
    #[error("functional requires real-valued fields (non-zero imaginary part found)")]
    ComplexInput,
    #[error("quartic form is non-positive (N = {0}); pair lies outside the cone where the operation is defined")]
    NonPositiveQuartic(f64),
    #[error("operation requires dimension n = {expected}, got n = {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("parameter regime violated: {0}")]
    RegimeViolation(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("no negative real root of the proportionality cubic in [-10, 0)")]
    NoProportionalRoot,
    #[error("eigensolver failed: {0}")]
    Eigensolve(String),
    #[error("time t = {0} is not admissible here")]
    BadTime(f64),
    #[error("the two closed forms of the sharp constant disagree: {via_s} vs {via_m}")]
    GnBranchMismatch { via_s: f64, via_m: f64 },
    #[error("snapshot i/o: {0}")]
    SnapshotIo(#[from] std::io::Error),
    #[error("snapshot format: {0}")]
    SnapshotFormat(String),
}

pub type Result<T> = std::result::Result<T, Error>;
