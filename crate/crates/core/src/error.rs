use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("d∘d ≠ 0 between degrees {0} and {1}")]
    NotAComplex(i32, i32),
    #[error("not a chain map in degree {0}")]
    NotAChainMap(i32),
    #[error("not functorial along chain {0}")]
    NotFunctorial(String),
    #[error("not open: {0}")]
    NotOpen(String),
    #[error("not closed: {0}")]
    NotClosed(String),
    #[error("base poset mismatch: {0}")]
    BaseMismatch(String),
    #[error("map kind mismatch: expected {expected}, got {got}")]
    KindMismatch { expected: String, got: String },
    #[error("size budget exceeded: need {needed}, budget {budget}")]
    Budget { needed: usize, budget: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("localization did not terminate after {0} sweeps")]
    Diverged(usize),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::Budget { .. } => 4,
            _ => 3,
        }
    }
}
