use thiserror::Error;

use crate::domain::Val;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("enumerating {product} tuples exceeds the cap of {cap}")]
    EnumerationCapExceeded { product: u128, cap: u64 },
    #[error("automaton has no accepting path of length {0}")]
    MalformedAutomaton(usize),
    #[error("initial bound {0} is outside [-2^32, 2^32]")]
    BoundOutOfRange(Val),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("invalid engine configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("size {size} is out of range {min}..={max} for model `{model}`")]
    SizeOutOfRange { model: String, size: u32, min: u32, max: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;
