use thiserror::Error;

#[derive(Error, Debug)]
pub enum GwiError {
    #[error("invalid arity: {0}")]
    InvalidArity(String),

    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, GwiError>;
