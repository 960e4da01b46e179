use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the solver, the configuration loader and the harness.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("configuration error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("numerical failure at cell ({i}, {k}) during {stage}: {detail}")]
    Numerical {
        stage: String,
        i: isize,
        k: isize,
        detail: String,
    },

    #[error("step limit of {max_steps} reached at t = {t}")]
    StepLimit { max_steps: usize, t: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SolverError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        SolverError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SolverError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            SolverError::Config { .. } | SolverError::Io { .. } | SolverError::Contract(_) => 1,
            SolverError::Numerical { .. } | SolverError::StepLimit { .. } => 2,
        }
    }
}

pub type Result<T, E = SolverError> = std::result::Result<T, E>;
