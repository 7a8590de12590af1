use serde::Serialize;

/// Failures surfaced by the command-line front-end.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Rejected by the pricing engines.
    #[error(transparent)]
    Core(#[from] binbond_core::Error),
    /// The scenario file is not valid TOML or does not match the schema.
    #[error("scenario parse error: {0}")]
    Parse(String),
    /// The scenario parsed but describes an invalid request.
    #[error("invalid scenario: {0}")]
    Scenario(String),
    /// Reading or writing a file failed.
    #[error("{path}: {source}")]
    Io {
        /// File involved.
        path: String,
        /// Underlying failure.
        source: std::io::Error,
    },
    /// A validation run found disagreement beyond tolerance.
    #[error("validation failed: {0}")]
    Accuracy(String),
}

impl CliError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Parse(_) => "PARSE",
            CliError::Scenario(_) => "INVALID_SCENARIO",
            CliError::Io { .. } => "IO",
            CliError::Accuracy(_) => "ACCURACY",
        }
    }

    /// Process exit code: 2 validation, 3 unsupported regime, 4 accuracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(binbond_core::Error::UnsupportedRegime { .. }) => 3,
            CliError::Accuracy(_) => 4,
            _ => 2,
        }
    }

    /// Structured rendering for stderr.
    pub fn to_record(&self) -> ErrorRecord {
        ErrorRecord { error: self.code(), message: self.to_string() }
    }
}

/// Structured error as written to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    /// Stable code.
    pub error: &'static str,
    /// Human-readable detail.
    pub message: String,
}

/// Result alias for the front-end.
pub type Result<T> = std::result::Result<T, CliError>;
