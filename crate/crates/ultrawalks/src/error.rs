use thiserror::Error;

/// Errors produced by construction and propagation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NotPrime(u32),
    #[error("level l = {level} out of range for p = {p}: need 1 <= l with p^l <= {max}")]
    LevelOutOfRange { p: u32, level: u32, max: u64 },
    #[error("state index {index} out of range for group of size {size}")]
    IndexOutOfRange { index: u64, size: u64 },
    #[error("alpha = {0} sits on a singular point of the kernel normalization")]
    SingularAlpha(f64),
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("kernel values and tail mass must be nonnegative (offending value {0})")]
    NegativeKernel(f64),
    #[error("kernel has {got} per-level values, expected {expected}")]
    LevelCountMismatch { got: usize, expected: usize },
    #[error("kernel mass is {mass}, but must equal 1 within {tol}")]
    MassViolation { mass: f64, tol: f64 },
    #[error("Fourier symbol at frequency exponent {j} unavailable for a tabulated kernel of depth {level}")]
    SymbolOutOfRange { j: u32, level: u32 },
    #[error("invalid adjacency data: {0}")]
    InvalidAdjacency(String),
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("clustering tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("quadrature needs T > 0 and steps >= 2 (got T = {t_max}, steps = {steps})")]
    BadQuadrature { t_max: f64, steps: usize },
    #[error("symmetric eigensolver failed to converge")]
    EigenFailure,
    #[error("kernel file rejected: {0}")]
    KernelFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
