use serde_json::{json, Value};
use thiserror::Error;

/// Errors raised by the library. Row, column and set indices carried by
/// variants are 1-based, matching the JSON wire formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("matrix is not rectangular: row {row} has {found} entries, expected {expected}")]
    NotRectangular {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("entry ({row},{col}) is not a finite number")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("entry ({row},{col}) is negative")]
    NegativeEntry { row: usize, col: usize },
    #[error("row {0} has no positive entry")]
    ZeroRow(usize),
    #[error("column {0} has no positive entry")]
    ZeroColumn(usize),
    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("support vector {0} has fewer than two nonzero coordinates")]
    SupportTooSmall(usize),
    #[error("support vector is empty")]
    EmptySupport,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subset of columns is empty")]
    EmptySubset,
    #[error("index {index} is out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("enumeration over {size} elements exceeds the subset cap of {cap}")]
    SubsetCapExceeded { size: usize, cap: usize },
    #[error("instance is infeasible: the subset {violating:?} has slack {slack}")]
    InfeasibleInstance { violating: Vec<usize>, slack: f64 },
    #[error("real part of s lies outside the convergence region: {constraint} fails")]
    OutsideConvergenceRegion { constraint: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("epsilon coordinate {0} is not strictly positive")]
    NonpositiveEpsilon(usize),
    #[error("unknown strategy `{name}`; available: {available:?}")]
    UnknownStrategy {
        name: String,
        available: Vec<&'static str>,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyMatrix => "EmptyMatrix",
            Error::NotRectangular { .. } => "NotRectangular",
            Error::NonFiniteEntry { .. } => "NonFiniteEntry",
            Error::NegativeEntry { .. } => "NegativeEntry",
            Error::ZeroRow(_) => "ZeroRow",
            Error::ZeroColumn(_) => "ZeroColumn",
            Error::DimensionTooLarge { .. } => "DimensionTooLarge",
            Error::SupportTooSmall(_) => "SupportTooSmall",
            Error::EmptySupport => "EmptySupport",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EmptySubset => "EmptySubset",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::SubsetCapExceeded { .. } => "SubsetCapExceeded",
            Error::InfeasibleInstance { .. } => "InfeasibleInstance",
            Error::OutsideConvergenceRegion { .. } => "OutsideConvergenceRegion",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NonpositiveEpsilon(_) => "NonpositiveEpsilon",
            Error::UnknownStrategy { .. } => "UnknownStrategy",
            Error::Parse(_) => "Parse",
            Error::Internal(_) => "Internal",
        }
    }

    /// JSON object describing the error, suitable for standard error.
    pub fn to_json(&self) -> Value {
        let mut obj = json!({ "error": self.kind(), "message": self.to_string() });
        let extra = match self {
            Error::NegativeEntry { row, col } | Error::NonFiniteEntry { row, col } => {
                json!({ "row": row, "col": col })
            }
            Error::ZeroRow(row) => json!({ "row": row }),
            Error::ZeroColumn(col) => json!({ "col": col }),
            Error::SupportTooSmall(j) => json!({ "index": j }),
            Error::SubsetCapExceeded { size, cap } => json!({ "size": size, "cap": cap }),
            Error::InfeasibleInstance { violating, slack } => {
                json!({ "violating_K": violating, "slack": slack })
            }
            Error::OutsideConvergenceRegion { constraint } => json!({ "constraint": constraint }),
            Error::DimensionMismatch { expected, found } => {
                json!({ "expected": expected, "found": found })
            }
            _ => Value::Null,
        };
        if let (Value::Object(base), Value::Object(more)) = (&mut obj, extra) {
            base.extend(more);
        }
        obj
    }
}
