//! Crate-wide error type.

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by any operation in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Operand shapes are incompatible. Both shapes are reported.
    #[error("{op}: dimension mismatch ({lhs} vs {rhs})")]
    DimensionMismatch {
        op: &'static str,
        lhs: String,
        rhs: String,
    },

    /// A row index exceeds the matrix row count.
    #[error("{op}: row index {index} out of range for {rows} rows")]
    RowOutOfRange {
        op: &'static str,
        index: usize,
        rows: usize,
    },

    /// Row index sets must be strictly increasing.
    #[error("{op}: row indices must be strictly increasing")]
    RowsNotIncreasing { op: &'static str },

    /// A select-gate count larger than the gate vector.
    #[error("select gate: requested {requested} updates but only {len} neurons")]
    GateCountOutOfRange { requested: usize, len: usize },

    /// A configuration value is outside its documented range.
    #[error("invalid {what}: {details}")]
    InvalidConfig { what: &'static str, details: String },

    /// An input that must be nonempty was empty.
    #[error("empty {0}")]
    Empty(&'static str),

    /// A NaN or infinity appeared where finite values are required.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A signal with zero power where nonzero power is required.
    #[error("silent {0}: signal power is zero")]
    SilentSignal(&'static str),

    /// Audio pipeline constraint violation (sample rate, length, ...).
    #[error("audio: {0}")]
    Audio(String),

    /// Malformed or unsupported WAV data.
    #[error("wav: {0}")]
    WavFormat(String),

    /// Malformed weight file (bad magic, truncation, bad tensor record).
    #[error("weight file: {0}")]
    WeightFormat(String),

    /// Weight file written by an incompatible format version.
    #[error("weight file: unsupported format version {found} (expected {expected})")]
    WeightVersion { found: u16, expected: u16 },

    /// Inconsistent tensor shapes inside a weight file.
    #[error("weight file: shape mismatch for {tensor}: {details}")]
    WeightShape { tensor: String, details: String },

    /// Training produced a non-finite loss.
    #[error("training diverged: non-finite loss at epoch {epoch}")]
    TrainingDiverged { epoch: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dim(op: &'static str, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            lhs: lhs.into(),
            rhs: rhs.into(),
        }
    }
}
