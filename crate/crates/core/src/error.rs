use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse exact value from {0:?}")]
    Parse(String),
    #[error("cyclotomic order {0} does not divide target order {1}")]
    OrderMismatch(u32, u32),
    #[error("precision not achieved: {0}")]
    PrecisionNotAchieved(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LevelError {
    #[error("unsupported level {0}: level must be odd")]
    EvenLevel(u32),
    #[error("unsupported level {0}: level must be at least 3")]
    TooSmall(u32),
    #[error("point ({0}, {1}) has order {2}, not the level {3}")]
    LowOrder(u32, u32, u32, u32),
    #[error("chain built for level {found} used with level {expected}")]
    LevelMismatch { expected: u32, found: u32 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeckeError {
    #[error("matrix {matrix} has determinant {found}, expected {expected}")]
    Determinant { matrix: String, expected: String, found: String },
    #[error("determinant {0} is not congruent to 1 modulo {1}")]
    NotOneModN(String, u32),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("condition C_m failed: {0}")]
    ConditionFailed(String),
    #[error("theta family did not pass the relation checks: {0}")]
    ThetaRejected(String),
    #[error("theta file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty matrix family")]
    Empty,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Level(#[from] LevelError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("internal assertion failed: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
