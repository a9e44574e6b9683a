use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}, column {column}: cannot parse {text:?} as a number")]
    Parse {
        line: usize,
        column: usize,
        text: String,
    },

    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: non-finite value")]
    NonFinite { line: usize, column: usize },

    #[error("fewer than 2 rows (found {0})")]
    TooFewRows(usize),

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("duplicate column name {0:?}")]
    DuplicateName(String),

    #[error("item index {item} out of range for {k} columns")]
    ItemOutOfRange { item: usize, k: usize },

    #[error("item {0} already present in itemset")]
    DuplicateItem(usize),

    #[error("invalid probability {0}")]
    InvalidProbability(f64),

    #[error("alpha {alpha} too large for {n} rows")]
    AlphaTooLarge { alpha: f64, n: usize },

    #[error("cdf entry at row {row}, column {column} is {value}, outside [0, 1]")]
    CdfOutOfRange { row: usize, column: usize, value: f64 },

    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    #[error("block statistics require a copula rank matrix")]
    NotCopula,

    #[error("itemset of size {size} exceeds the partition cap {cap}")]
    PartitionCapExceeded { size: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal numeric error: {0}")]
    Numeric(String),
}
