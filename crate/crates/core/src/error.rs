use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing mandatory column(s): {}", .0.join(", "))]
    MissingColumns(Vec<String>),
    #[error("empty series for {market}/{commodity}")]
    EmptySeries { market: String, commodity: String },
    #[error("gap too large: {days} days without data before {date}")]
    GapTooLarge { date: NaiveDate, days: i64 },
    #[error("insufficient history: need {needed} days ending {end}, have {available}")]
    InsufficientHistory {
        end: NaiveDate,
        needed: usize,
        available: usize,
    },
    #[error("unsupported version {0}")]
    UnsupportedVersion(u32),
    #[error("corrupt dataset: {0}")]
    CorruptDataset(String),
    #[error("empty values")]
    EmptyValues,
    #[error("insufficient years: need at least 2 values, got {0}")]
    InsufficientYears(usize),
    #[error("duplicate period label {0}")]
    DuplicateLabel(String),
    #[error("invalid summary for {label}: {reason}")]
    InvalidSummary { label: String, reason: String },
    #[error("unknown period {0}")]
    UnknownPeriod(String),
    #[error("series too short: need {needed} values, got {got}")]
    SeriesTooShort { needed: usize, got: usize },
    #[error("series contains non-finite values")]
    NonFinite,
    #[error("invalid ARIMA order ({p},{d},{q})")]
    InvalidOrder { p: usize, d: usize, q: usize },
    #[error("empty order grid")]
    EmptyGrid,
    #[error("every candidate order failed to fit")]
    AllFitsFailed,
    #[error("empty forecast")]
    EmptyForecast,
    #[error("no actual price for recommended date {0}")]
    MissingActual(NaiveDate),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code, used by the HTTP layer and CLI reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
            Error::MissingColumns(_) => "missing_columns",
            Error::EmptySeries { .. } => "empty_series",
            Error::GapTooLarge { .. } => "gap_too_large",
            Error::InsufficientHistory { .. } => "insufficient_history",
            Error::UnsupportedVersion(_) => "unsupported_version",
            Error::CorruptDataset(_) => "corrupt_dataset",
            Error::EmptyValues => "empty_values",
            Error::InsufficientYears(_) => "insufficient_years",
            Error::DuplicateLabel(_) => "duplicate_label",
            Error::InvalidSummary { .. } => "invalid_summary",
            Error::UnknownPeriod(_) => "unknown_period",
            Error::SeriesTooShort { .. } => "series_too_short",
            Error::NonFinite => "non_finite",
            Error::InvalidOrder { .. } => "invalid_order",
            Error::EmptyGrid => "empty_grid",
            Error::AllFitsFailed => "all_fits_failed",
            Error::EmptyForecast => "empty_forecast",
            Error::MissingActual(_) => "missing_actual",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}
