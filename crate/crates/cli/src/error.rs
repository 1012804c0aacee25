use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// The scenario file could not be parsed; the message carries line and
    /// column from the JSON reader.
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid scenario: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("unstable at {axis} = {value}: no theta satisfies p_a(theta) q(theta) < 1")]
    Unstable { axis: &'static str, value: String },

    #[error(transparent)]
    Model(#[from] mmwave_snc::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Unstable { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
