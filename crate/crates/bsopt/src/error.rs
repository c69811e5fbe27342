use std::path::PathBuf;

use bsopt_core::Error as CoreError;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Usage(String),
}

impl HarnessError {
    /// Process exit status: 2 infeasible, 3 no convergence, 4 IO, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(CoreError::Infeasible { .. }) => 2,
            HarnessError::Core(CoreError::NoConvergence { .. }) => 3,
            HarnessError::Io { .. } => 4,
            HarnessError::Csv { source, .. } if source.is_io_error() => 4,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        HarnessError::Csv {
            path: path.into(),
            source,
        }
    }
}
