use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BozkError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("field is not hermitian (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("simulation diverged; last valid time {last_valid_time}")]
    Diverged { last_valid_time: f64 },
    #[error("unresolvable configuration: {0}")]
    Unresolvable(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("malformed coefficient file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, BozkError>;

impl From<std::io::Error> for BozkError {
    fn from(e: std::io::Error) -> Self {
        BozkError::Io(e.to_string())
    }
}
