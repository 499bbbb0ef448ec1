use std::fmt;
use std::path::Path;

/// Process exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BAND: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Invalid setting; `field` is the flag name without dashes.
    Config {
        field: &'static str,
        reason: String,
    },
    Io {
        path: String,
        source: std::io::Error,
    },
    Csv(String),
    Run(sde_rand_em_core::Error),
}

impl CliError {
    pub fn config(field: &'static str, reason: impl Into<String>) -> Self {
        CliError::Config {
            field,
            reason: reason.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, reason } => write!(f, "invalid --{field}: {reason}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::Csv(msg) => write!(f, "csv: {msg}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io { source, .. } => Some(source),
            CliError::Run(e) => Some(e),
            _ => None,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e.to_string())
    }
}
