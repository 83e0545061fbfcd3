use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("unknown coupled label (j={j}, m={m}) for ranks (s={s}, l={l})")]
    UnknownLabel { s: String, l: String, j: String, m: String },
    #[error("invalid probability {value} for label {label}")]
    InvalidProbability { label: String, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidDensity(String),
    #[error("operation requires a qubit subchannel A (s = 1/2), got s = {0}")]
    NotQubitChannel(String),
    #[error("operation requires a dual channel (s == l), got s = {s}, l = {l}")]
    NotDualChannel { s: String, l: String },
    #[error("operation requires a coupled-diagonal (spectral) state")]
    NotSpectral,
    #[error("conditioning on outcome {outcome} which has zero probability")]
    UndefinedConditional { outcome: String },
    #[error("parameter {name} = {value} outside domain {domain}")]
    OutOfDomain { name: String, value: f64, domain: String },
    #[error("sampled mode requires shots > 0")]
    ZeroShots,
    #[error("measurement map is underdetermined: rank {rank} of {needed} parameters")]
    Underdetermined { rank: usize, needed: usize },
    #[error("records do not cover the plan: {0}")]
    IncompleteRecords(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
