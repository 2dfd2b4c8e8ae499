use thiserror::Error;

use crate::roots::Family;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rank {rank} for family {family}")]
    InvalidRank { family: Family, rank: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gamma function pole at {0}")]
    Pole(i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("series or sum did not converge: {0}")]
    NonConvergence(String),
    #[error("weight is not symmetric under x -> -x")]
    SymmetryViolation,
    #[error("integral diverges: {0}")]
    Divergence(String),
    #[error("tensor quadrature supports dimension <= {max}, got {dim}; use Monte Carlo instead")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("variance estimate is not finite")]
    HeavyTail,
    #[error("pairing matrix is singular or ill-conditioned (condition estimate {0:e})")]
    SingularPairing(f64),
    #[error("basis polynomial {index} is not monic of degree {index}")]
    NonMonicBasis { index: usize },
    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
