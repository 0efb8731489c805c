use chrono::NaiveDate;
use thiserror::Error;

/// Errors raised anywhere in the analysis chain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty series (length >= 1 violated)")]
    EmptySeries,

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("no row matches selector '{0}'")]
    NoMatchingRow(String),

    #[error("no country/region column in header")]
    NoRegionColumn,

    #[error("no date columns in header")]
    NoDateColumns,

    #[error("unparseable date header '{0}'")]
    BadDateHeader(String),

    #[error("unparseable date '{value}' on line {line}")]
    BadDate { line: u64, value: String },

    #[error("non-numeric cell '{value}' on line {line}")]
    NonNumeric { line: u64, value: String },

    #[error("dates not consecutive: {prev} followed by {next}")]
    DatesNotConsecutive { prev: NaiveDate, next: NaiveDate },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("malformed row on line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("csv: {0}")]
    Csv(String),

    #[error("date range {from}..{to} outside data span {first}..{last}")]
    RangeOutsideSpan {
        from: NaiveDate,
        to: NaiveDate,
        first: NaiveDate,
        last: NaiveDate,
    },

    #[error("{what} needs at least {needed} points, got {got}")]
    TooShort {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible filter spec: {0}")]
    InfeasibleSpec(String),

    #[error(
        "spectrum is not conjugate-symmetric (residual {residual:e}, tolerance {tolerance:e})"
    )]
    AsymmetricSpectrum { residual: f64, tolerance: f64 },

    #[error("unstable section {index}: pole radius {radius}")]
    UnstableFilter { index: usize, radius: f64 },

    #[error("elliptic design failed to meet its template up to order {0}")]
    DesignFailed(usize),

    #[error("periods {first} and {second} both select bin {bin}")]
    BinCollision { first: f64, second: f64, bin: usize },

    #[error("operation requires a {expected} filter")]
    WrongFilterKind { expected: &'static str },
}

impl Error {
    /// True for failures of the numerical machinery itself rather than of the
    /// data or arguments handed to it.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::AsymmetricSpectrum { .. }
                | Error::UnstableFilter { .. }
                | Error::DesignFailed(_)
        )
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
