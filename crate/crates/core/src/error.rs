use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field size {size} exceeds the cap {cap}")]
    FieldTooLarge { size: u128, cap: u64 },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("elements or polynomials come from different field contexts")]
    MixedContexts,
    #[error("element value {value} out of range for a field of size {q}")]
    ElementOutOfRange { value: u64, q: u32 },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,
    #[error("field is not a quadratic extension tower")]
    NotQuadraticTower,
    #[error("incompatible field contexts: target is not an extension tower over the source")]
    IncompatibleContexts,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("group order {order} exceeds the enumeration cap {cap}")]
    OrderOverCap { order: String, cap: u64 },
    #[error("size guard exceeded: {0}")]
    CapExceeded(String),
    #[error("sampler gave up after {0} attempts")]
    RejectionCap(u64),
    #[error("generating-function identity violated at degree {degree}: {detail}")]
    IdentityViolation { degree: usize, detail: String },
    #[error("count recursion produced an inconsistent value at degree {degree}: {detail}")]
    CountInconsistency { degree: usize, detail: String },
    #[error("series truncation mismatch or missing unit constant term: {0}")]
    Series(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
