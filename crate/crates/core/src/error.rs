use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("duplicate element: {0}")]
    DuplicateElement(String),
    #[error("weight overflow")]
    WeightOverflow,
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("budget exceeded: {what} needs {needed} units, cap is {cap}")]
    BudgetExceeded { what: String, needed: u128, cap: u128 },
    #[error("universe too large: {0} elements (at most 128 supported)")]
    UniverseTooLarge(usize),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
}

pub type Result<T> = std::result::Result<T, Error>;
