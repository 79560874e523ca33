use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("element does not belong to {0}")]
    TypeMismatch(String),

    #[error("invalid arity: expected {expected}, got {got}")]
    InvalidArity { expected: String, got: usize },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("unsupported enumeration: {0}")]
    UnsupportedEnumeration(String),

    #[error("not implemented: {0}")]
    NotImplemented(String),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unwitnessed constant {0}")]
    Unwitnessed(String),

    #[error("not found within search bound: {0}")]
    NotFound(String),

    #[error("variable list mismatch: {0}")]
    VariableMismatch(String),

    #[error("hypothesis T2 violated: {0}")]
    QuotientViolation(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
