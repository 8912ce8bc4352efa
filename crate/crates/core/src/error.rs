use thiserror::Error;

/// Errors raised by the algebra kernel and the cover construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no embedding of F_{{p^{from}}} into F_{{p^{to}}}")]
    NoEmbedding { from: usize, to: usize },
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("form is not homogeneous")]
    NotHomogeneous,
    #[error("input is zero")]
    ZeroInput,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("resource budget exceeded: {0}")]
    ResourceBudgetExceeded(String),
    #[error("degree cap {cap} exceeded while searching for {what}")]
    DegreeCapExceeded { what: String, cap: u32 },
    #[error("point {0} lies on the divisor")]
    PointOnDivisor(String),
    #[error("divisors are not transverse at {0}")]
    NotTransverse(String),
    #[error("first map form vanishes on a component of X (common factor {0})")]
    ComponentCollapse(String),
    #[error("could not cover every component of X with marked points: {0}")]
    ComponentCoverageFailed(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("unsupported input, would require blowing up: {0}")]
    UnsupportedRequiresBlowup(String),
    #[error("invalid instance: {0}")]
    Validation(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse { line: 0, col: 0, msg: msg.into() }
    }

    /// Re-anchors a parse error at a given line, keeping the column if one was set.
    pub fn at_line(self, line: usize, col_offset: usize) -> Self {
        match self {
            Error::Parse { col, msg, .. } => Error::Parse { line, col: col + col_offset, msg },
            other => other,
        }
    }
}
