use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no primes below {bound}: the smoothness bound must be at least 2")]
    EmptyRange { bound: u64 },

    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: String, modulus: String },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("{root} is not a simple root modulo {prime}")]
    NotSimpleRoot { root: u64, prime: u64 },

    #[error("{root} is not a multiple root modulo {prime}")]
    NotMultipleRoot { root: u64, prime: u64 },

    #[error("prime {prime} divides row {row}; the set family is only defined for l not dividing b")]
    PrimeDividesRow { prime: u64, row: u64 },

    #[error("{phase} division by {prime} at (b={b}, a={a}) found a non-divisible entry")]
    InvariantViolation {
        phase: &'static str,
        b: u64,
        a: i64,
        prime: u64,
    },

    #[error("region too large: {0}")]
    RegionTooLarge(String),

    #[error("enumeration of {size} polynomials exceeds the cap of {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
