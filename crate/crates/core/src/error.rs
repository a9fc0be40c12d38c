use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid permutation for column {column}: {reason}")]
    InvalidPermutation { column: usize, reason: String },

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("{what} budget exceeded: needs {needed}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("entry {value} at ({row}, {col}) is not in {{0, 1}}")]
    NotBinary { row: usize, col: usize, value: i128 },

    #[error("matrix has {0} distinct values, at most 2 allowed")]
    TooManyValues(usize),

    #[error("matrix row sums are not constant")]
    NonConstantRowSums,

    #[error("columns do not share one entry multiset (column {0} differs)")]
    NotSameMultiset(usize),

    #[error("entry {value} at ({row}, {col}) is not in the value set")]
    ValueNotInSet { row: usize, col: usize, value: i128 },

    #[error("column {0} is already oppositely ordered against the other columns")]
    AlreadyOppositelyOrdered(usize),

    #[error("quantiles are not non-decreasing at index {0}")]
    NonMonotoneQuantiles(usize),

    #[error("empty row selection: {0}")]
    EmptySelection(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
