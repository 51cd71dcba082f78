use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("valuation of zero")]
    ValuationOfZero,

    #[error("{0} is not prime")]
    NotPrime(BigUint),

    #[error("cannot factor zero")]
    FactorZero,

    /// The input exceeds the configured size, or the rho budget ran out on a
    /// composite cofactor. Never a silent wrong answer.
    #[error("factorization bound exceeded for {n} (limit 2^{bound_bits})")]
    FactorizationBound { n: BigUint, bound_bits: u32 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("general position check restricted to hyperplanes")]
    NotLinear,

    #[error("forms are not in general position")]
    NotGeneralPosition,

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("divisor classes live on different blow-ups")]
    ClassMismatch,

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("point on support")]
    PointOnSupport,

    #[error("degenerate degrees: {0}")]
    DegenerateDegrees(String),

    #[error("{0} is not an S-integer")]
    NotSInteger(String),

    #[error("divisor is zero")]
    ZeroDivisor,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("search box too large: {0} candidate tuples")]
    BoxTooLarge(u128),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Resource-bound failures map to a distinct CLI exit code.
    pub fn is_resource_bound(&self) -> bool {
        matches!(self, Error::FactorizationBound { .. } | Error::BoxTooLarge(_))
    }
}
