use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("operation requires p ≡ {expected} (mod 4), got p = {p}")]
    ResidueClass { p: u64, expected: u64 },
    #[error("{d} is not a quadratic residue modulo {p}")]
    NotQuadraticResidue { d: i64, p: u64 },
    #[error("index {k} outside 1..={n}")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("matrix is not square: {rows} rows, row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("{bits}-bit precision insufficient: {what}")]
    InsufficientPrecision { bits: usize, what: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
