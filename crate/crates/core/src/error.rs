use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("term index must be positive")]
    ZeroTerm,
    #[error("dyadic subtraction would go negative")]
    Underflow,
    #[error("number of terms must be at least 2, got {0}")]
    TooFewTerms(u64),
    #[error("invalid solution: {0}")]
    InvalidSolution(&'static str),
    #[error("value must lie strictly between 0 and 2")]
    OutOfRange,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("modulus {0} is even; 2 is not invertible")]
    EvenModulus(BigUint),
    #[error("modulus {0} is too large without a factorization of a multiple of the order")]
    UnsupportedModulus(BigUint),
    #[error("supplied factorization does not describe a multiple of the order")]
    BadFactorization,
    #[error("value does not fit in 64 bits")]
    Overflow,
    #[error("internal verification failed: {0}")]
    Verification(&'static str),
    #[error("certification failed for u = {0}")]
    Certification(u64),
    #[error("chain inconsistent at step {step}: {reason}")]
    ChainInconsistent { step: usize, reason: &'static str },
    #[error("i/o: {0}")]
    Io(String),
    #[error("checkpoint line {line}: {reason}")]
    Checkpoint { line: usize, reason: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
