use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("field of order {0} is too large")]
    FieldTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("conjugation needs an even extension degree, got k = {0}")]
    NoConjugation(u32),
    #[error("square classes are undefined here: {0}")]
    SquareClass(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("group {0} is excluded from the admissible list")]
    Excluded(String),
    #[error("operation not defined for {0}")]
    WrongFamily(String),
    #[error("element is not a member of {0}")]
    NotMember(String),
    #[error("group order {order} exceeds the cap {cap}")]
    CapExceeded { order: u128, cap: u128 },
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("element is central")]
    Central,
    #[error("set is not closed under conjugation")]
    NotNormal,
    #[error("sets belong to different group tables")]
    TableMismatch,
    #[error("permutation is odd")]
    OddPermutation,
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
