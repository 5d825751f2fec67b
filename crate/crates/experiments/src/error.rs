use std::path::PathBuf;

/// Failures surfaced by the experiment layer. Each maps to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config: {field}: {message}")]
    Invalid { field: String, message: String },
    #[error("config could not be serialized: {0}")]
    Emit(#[from] toml::ser::Error),
    #[error(transparent)]
    Core(#[from] spinbath_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

impl ExperimentError {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Invalid { field: field.into(), message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 2 for anything the user can fix in the config, 3 for numeric
    /// breakdown, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use spinbath_core::Error as E;
        match self {
            Self::Parse(_) | Self::Invalid { .. } => 2,
            Self::Core(E::NonFinite(_)) => 3,
            Self::Core(_) => 2,
            Self::Emit(_) | Self::Io { .. } | Self::Csv(_) => 1,
        }
    }
}
