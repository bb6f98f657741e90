use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {left} vs {right}")]
    GridMismatch { left: String, right: String },

    #[error("non-finite value {value} at cell {cell}")]
    NonFinite { cell: usize, value: f64 },

    #[error("value {value:e} at cell {cell} outside [{floor:e}, {ceiling:e}]")]
    OutOfRange {
        cell: usize,
        value: f64,
        floor: f64,
        ceiling: f64,
    },

    #[error("domain error at cell {cell}: {reason}")]
    Domain { cell: usize, reason: String },

    #[error("invalid interval [{start},{end}) for {n_cells} cells")]
    InvalidInterval {
        start: usize,
        end: usize,
        n_cells: usize,
    },

    #[error("invalid exponent: {0}")]
    InvalidExponent(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero test function")]
    ZeroFunction,

    #[error("empty candidate pool with zero ascent budget")]
    EmptySearch,

    #[error("malformed input at line {line}: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("expected {expected} rows, found {found}")]
    CountMismatch { expected: usize, found: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
