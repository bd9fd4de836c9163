use thiserror::Error;

/// Errors raised across the fitting, simulation and I/O layers.
#[derive(Debug, Error)]
pub enum PpsbmError {
    #[error("line {line}: {message}")]
    MalformedRow { line: usize, message: String },
    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: usize },
    #[error("line {line}: time {time} outside [0, {horizon})")]
    TimeOutOfRange { line: usize, time: f64, horizon: f64 },
    #[error("event file contains no events")]
    EmptyInput,
    #[error("invalid stream: {0}")]
    InvalidStream(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("number of groups {groups} exceeds number of nodes {nodes}")]
    TooManyGroups { groups: usize, nodes: usize },
    #[error("label vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("ICL requires histogram estimates; kernel fits are not supported")]
    UnsupportedEstimator,
    #[error("all {0} runs failed")]
    AllRunsFailed(usize),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl PpsbmError {
    /// Stable snake_case identifier used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            PpsbmError::MalformedRow { .. } => "malformed_row",
            PpsbmError::SelfLoop { .. } => "self_loop",
            PpsbmError::TimeOutOfRange { .. } => "time_out_of_range",
            PpsbmError::EmptyInput => "empty_input",
            PpsbmError::InvalidStream(_) => "invalid_stream",
            PpsbmError::InvalidModel(_) => "invalid_model",
            PpsbmError::InvalidConfig(_) => "invalid_config",
            PpsbmError::TooManyGroups { .. } => "too_many_groups",
            PpsbmError::LengthMismatch { .. } => "length_mismatch",
            PpsbmError::UnsupportedEstimator => "unsupported_estimator",
            PpsbmError::AllRunsFailed(_) => "all_runs_failed",
            PpsbmError::Io(_) => "io",
            PpsbmError::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, PpsbmError>;
