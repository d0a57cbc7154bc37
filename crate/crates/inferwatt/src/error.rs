use std::fmt;

/// Errors produced by parsing, fitting, and simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A benchmark CSV row could not be parsed. Row numbers are 1-based and
    /// count the header.
    Parse { row: usize, field: String, message: String },
    /// The benchmark input had no header row at all.
    EmptyInput,
    /// An operation that needs at least one record got none.
    EmptyRecords,
    /// A fit was asked to combine records from different models.
    MixedModels { expected: String, found: String },
    /// Quantile parameters out of order or non-positive.
    InvalidQuantiles { p5: f64, p95: f64 },
    /// A scalar argument violated its domain.
    InvalidArgument { name: &'static str, value: f64, requirement: &'static str },
    /// Mix weights must be positive and sum to one.
    BadWeights { sum: f64 },
    /// Summary statistics need at least one sample.
    EmptySamples,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { row, field, message } => {
                write!(f, "row {row}: bad field `{field}`: {message}")
            }
            Error::EmptyInput => write!(f, "empty input: expected a CSV header row"),
            Error::EmptyRecords => write!(f, "no records to operate on"),
            Error::MixedModels { expected, found } => {
                write!(f, "mixed model names in fit: `{expected}` vs `{found}`")
            }
            Error::InvalidQuantiles { p5, p95 } => {
                write!(f, "invalid quantiles: need 0 < p5 <= p95, got p5={p5}, p95={p95}")
            }
            Error::InvalidArgument { name, value, requirement } => {
                write!(f, "invalid `{name}` = {value}: must be {requirement}")
            }
            Error::BadWeights { sum } => {
                write!(f, "mix weights must be positive and sum to 1, got sum {sum}")
            }
            Error::EmptySamples => write!(f, "cannot summarize an empty sample set"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
