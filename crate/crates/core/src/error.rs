use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("Fock dimension {dim} exceeds the configured cap {cap}")]
    DimensionCap { dim: u128, cap: usize },

    #[error("field has zero amplitude on the retained modes")]
    ZeroWindow,

    #[error("zero low-frequency content below cutoff {cutoff}: cannot renormalize")]
    ZeroLowFrequency { cutoff: f64 },

    #[error("interaction width {eps} is below the resolvable minimum {min} (two grid spacings)")]
    Unresolvable { eps: f64, min: f64 },

    #[error("solution diverged at t = {time} (norm {norm})")]
    Divergence { time: f64, norm: f64 },

    #[error("Krylov propagation did not converge within {substeps} substeps (remaining {remaining}, last error estimate {estimate:e})")]
    NonConvergence { substeps: usize, remaining: f64, estimate: f64 },

    #[error("counting distribution failed: {0}")]
    Counting(String),

    #[error("state is not permutation symmetric (asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("value {value} outside the admissible range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
