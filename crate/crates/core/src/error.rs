use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// `max - min + 1` does not fit the widened key-range type.
    #[error("range overflow: key range of [{min}, {max}] is not representable")]
    RangeOverflow { min: i64, max: i64 },

    /// Counting sort would need more auxiliary words than the configured cap.
    #[error("range too large: key range {k} exceeds counting-sort allocation cap {cap}")]
    RangeTooLarge { k: u128, cap: u64 },

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    #[error("invalid dataset spec: {0}")]
    InvalidDataset(String),

    #[error("zipf range cap: k = {k} exceeds the inverse-CDF table limit of {cap}")]
    ZipfRangeCap { k: u64, cap: u64 },

    /// A token in an input file is not a signed 64-bit integer.
    #[error("{path}: line {line}: expected a signed 64-bit integer, found {token:?}")]
    InvalidToken { path: PathBuf, line: usize, token: String },

    #[error("{path}: binary input length {len} is not a multiple of 8 bytes")]
    TruncatedBinary { path: PathBuf, len: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("model parse error: {0}")]
    ModelParse(String),

    #[error("model validation error: {0}")]
    ModelValidation(String),

    #[error("unsupported model version {found:?} (expected {expected:?})")]
    UnsupportedModelVersion { found: String, expected: String },

    #[error("invalid calibration input: {0}")]
    Calibration(String),

    #[error("invalid benchmark request: {0}")]
    Bench(String),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
