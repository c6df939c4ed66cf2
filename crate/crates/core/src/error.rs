use thiserror::Error;

use crate::tempo::ConsistencyReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A lap sequence violates its invariants; `bar` is 1-based.
    #[error("bar {bar}: {message}")]
    InvalidLap { bar: usize, message: String },

    /// An argument falls outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A row of a delimited input could not be read; `row` is 1-based and
    /// counts every physical record including headers.
    #[error("row {row}: {message} (found {text:?})")]
    Parse { row: usize, text: String, message: String },

    /// A structured document is well-formed but violates its schema.
    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    /// Workbook blocks do not line up on the shared bar index.
    #[error("alignment error in recording {label:?} at row {row}: {message}")]
    Alignment { label: String, row: usize, message: String },

    #[error("lap count does not match the meter: expected {} bars, found {}", .0.expected_bars, .0.actual_bars)]
    BarCountMismatch(Box<ConsistencyReport>),

    /// Two fermata timings diverge by more than the limit.
    #[error("third measurement required: candidates differ by {spread:.3} s (limit {limit:.3} s)")]
    ThirdMeasurementRequired { spread: f64, limit: f64 },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn schema(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: msg.into(),
        }
    }
}
