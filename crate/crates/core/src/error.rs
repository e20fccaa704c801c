use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("division by zero")]
    DivisionByZero,

    #[error("element is not invertible: {0}")]
    NotInvertible(String),

    #[error("verification failed: {0}")]
    Verification(String),

    /// An exhaustive search would exceed the configured budget.
    #[error("enumeration budget exceeded: needs {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}
