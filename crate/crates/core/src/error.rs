use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("input out of range: {0}")]
    OutOfRange(String),

    #[error("records were produced by mixed mechanisms or parameters: {0}")]
    MixedRecords(String),

    #[error("epsilon = 0 leaves the unbiasing factor undefined")]
    ZeroEpsilon,

    #[error("enumeration of {size} outcomes exceeds the cap of {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },

    #[error("packing construction failed after {attempts} attempts: {detail}")]
    PackingFailed { attempts: usize, detail: String },

    #[error("invalid experiment: {0}")]
    InvalidExperiment(String),

    #[error("insufficient data for fit: {0}")]
    InsufficientData(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv parse error at line {line}: {detail}")]
    CsvParse { line: usize, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
