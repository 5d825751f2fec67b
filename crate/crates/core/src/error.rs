use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis of {spins} spins exceeds the configured limit of {limit} spins")]
    DimensionOverflow { spins: usize, limit: usize },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("state dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid Hamiltonian term: {0}")]
    InvalidTerm(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite amplitude encountered during {0}")]
    NonFinite(&'static str),

    #[error("time {time} is not an integer multiple of the Trotter step {dt}")]
    NotCommensurate { time: f64, dt: f64 },

    #[error("time grids are misaligned: {0}")]
    MisalignedSeries(String),
}

pub type Result<T> = std::result::Result<T, Error>;
