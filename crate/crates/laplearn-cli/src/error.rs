//! Error type for the experiment harness.

/// Convenience alias used throughout the binary.
pub type Result<T> = std::result::Result<T, CliError>;

/// Anything that can stop a command.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Estimation-library error (solver, generator, ingestion, ...).
    #[error(transparent)]
    Lib(#[from] laplearn::Error),

    /// Filesystem trouble.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed JSON configuration.
    #[error("config {path}: {source}")]
    Config {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    /// JSON serialization failure (run summaries).
    #[error(transparent)]
    Json(#[from] serde_json::Error),

    /// Malformed results CSV handed to plot-tables.
    #[error("results file {path}, row {row}: {message}")]
    BadResultsRow {
        path: String,
        row: usize,
        message: String,
    },

    /// CSV-level read failure.
    #[error(transparent)]
    Csv(#[from] csv::Error),

    /// A configuration value that fails validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// No output path given in the config or on the command line.
    #[error("no output path: set \"output_path\" in the config or pass --output")]
    MissingOutputPath,
}

impl CliError {
    /// Wraps an I/O error with the path it concerns.
    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
