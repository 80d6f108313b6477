use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("undeclared tensor `{0}`")]
    UndeclaredHead(String),
    #[error("`{head}` has rank {expected}, got {got} indices")]
    RankMismatch { head: String, expected: usize, got: usize },
    #[error("index `{0}` is not in any declared alphabet")]
    UnknownIndex(String),
    #[error("index `{0}` appears with the same variance twice or more than twice")]
    IndexPairing(String),
    #[error("terms have different free indices: {0} vs {1}")]
    InhomogeneousFrees(String, String),
    #[error("name `{0}` is already declared")]
    Duplicate(String),
    #[error("group order exceeds the cap of {0}")]
    GroupTooLarge(usize),
    #[error("{0}")]
    Nonlinear(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("no solvable tensor structure: {0}")]
    NoSolvableStructure(String),
    #[error("{0}")]
    Invalid(String),
    #[error("numeric evaluation: {0}")]
    Numeric(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

