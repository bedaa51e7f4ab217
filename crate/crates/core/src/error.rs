//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// One rejected row of a sample file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based data-row number (the header row is not counted).
    pub row: usize,
    pub reason: String,
}

impl std::fmt::Display for RowError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "row {}: {}", self.row, self.reason)
    }
}

fn join_rows(rows: &[RowError]) -> String {
    rows.iter()
        .map(RowError::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude must be positive and finite, got {0}")]
    InvalidAmplitude(f64),
    #[error("time coefficient must be positive and finite, got {0}")]
    InvalidTimeCoefficient(f64),
    #[error("time advance must be non-negative and finite, got {0}")]
    InvalidTimeAdvance(f64),
    #[error("derivative order must be at least 1; order 0 is the function itself")]
    DerivativeOrderZero,

    #[error("empty mixture: no component has positive weighted amplitude")]
    EmptyMixture,
    #[error("component weight must be non-negative and finite, got {0}")]
    InvalidWeight(f64),
    #[error("component weights must sum to 1, got {sum}")]
    WeightsNotNormalized { sum: f64 },

    #[error("power value must be non-negative and finite, got {0} MW")]
    InvalidPower(f64),
    #[error("{name} must lie within [0, 1], got {value}")]
    ProportionOutOfRange { name: &'static str, value: f64 },
    #[error("cannot derive the wind share: intermittent generation is zero")]
    ZeroIpsPower,
    #[error("{0} profile is required because its generation share is positive")]
    MissingProfile(&'static str),

    #[error("requested advances must be positive, finite and strictly increasing, got {0}")]
    InvalidAdvance(f64),
    #[error("empty bin t={0}: no usable samples at that time advance")]
    EmptyBin(f64),
    #[error("rmse value must be non-negative and finite, got {0}")]
    InvalidRmse(f64),
    #[error("sequence points must have strictly increasing positive advances")]
    NonIncreasingAdvances,
    #[error("sequence needs >= 2 advances beyond t=0, got {0}")]
    SequenceTooShort(usize),
    #[error("sequence not increasing anywhere")]
    SequenceNotIncreasing,
    #[error("amplitude mode at24 requires a sequence point at t=24 h")]
    MissingDayAheadPoint,

    #[error("invalid sample header: expected 'source_id,time_advance_h,forecast_mw,actual_mw[,timestamp]', got '{found}'")]
    SampleHeader { found: String },
    #[error("{} malformed sample row(s): {}", rows.len(), join_rows(rows))]
    MalformedSamples { rows: Vec<RowError> },
    #[error("invalid config: {reason}")]
    InvalidConfig { reason: String },
    #[error("curve grid must be nonempty, non-negative, finite and strictly increasing")]
    InvalidGrid,
    #[error("invalid synthetic spec: {0}")]
    InvalidSynthSpec(&'static str),

    #[error("failed to read {path}: {source}")]
    ReadFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    WriteFile {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
