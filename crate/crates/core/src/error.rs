use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no rectangle encloses exactly {requested} red points; achievable range is [{min}, {max}]")]
    RedCountUnreachable { requested: usize, min: usize, max: usize },
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("rectangles {first} and {second} are not laminar")]
    NotLaminar { first: usize, second: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}

pub(crate) fn infeasible<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Infeasible(msg.into()))
}
