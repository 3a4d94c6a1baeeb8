use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("lattice basis is linearly dependent")]
    DependentBasis,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("defining polynomial must be monic of degree >= 1: {0}")]
    NotMonic(String),
    #[error("polynomial {poly} is reducible over Q (factor {factor})")]
    Reducible { poly: String, factor: String },
    #[error("{0} is not prime")]
    NotPrime(BigInt),
    #[error("ideals belong to different orders")]
    OrderMismatch,
    #[error("the zero element generates no fractional ideal")]
    ZeroElement,
    #[error("embedding precision cap of {0} bits reached without certification")]
    Precision(u32),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
