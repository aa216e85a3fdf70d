use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NotPrime(u32),
    #[error("field of {0} elements exceeds the supported size (at most 256)")]
    FieldTooLarge(u64),
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("modulus is reducible over GF({0})")]
    ReducibleModulus(u32),
    #[error("no default modulus for extension degree {0}; pass one explicitly")]
    NoDefaultModulus(u32),
    #[error("residue {value} out of range for GF({p})")]
    ResidueOutOfRange { value: u32, p: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("operation is undefined for the zero vector")]
    ZeroVector,
    #[error("precision exhausted: degree {degree} exceeds precision {precision}")]
    PrecisionExhausted { degree: usize, precision: usize },
    #[error("insufficient precision: need {needed} known coefficients, have {have}")]
    InsufficientPrecision { needed: usize, have: usize },
    #[error("psi is tabulated for r < {len}, but r = {r} was requested")]
    OutOfRange { r: u32, len: usize },
    #[error("invalid psi: {0}")]
    InvalidPsi(String),
    #[error("input must be positive and finite, got {0}")]
    NonPositiveInput(f64),
    #[error("enumeration of {needed} cells exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;
