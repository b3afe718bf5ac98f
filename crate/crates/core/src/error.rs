use std::path::PathBuf;

/// Errors raised anywhere in the solver pipeline.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`]),
/// which the command-line front end prints on failure.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("mesh geometry: {0}")]
    Geometry(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("total height lost positivity at node {node} (value {value:e}){}", step.map(|s| format!(" in step {s}")).unwrap_or_default())]
    PositivityLost {
        node: usize,
        value: f64,
        step: Option<usize>,
    },

    #[error("conjugate gradient stalled after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("conflicting constraints on dof {dof}: {first} vs {second}")]
    ConflictingConstraint { dof: usize, first: f64, second: f64 },

    #[error("internal: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Geometry(_) => "GEOMETRY_ERROR",
            Error::Input(_) => "INPUT_ERROR",
            Error::PositivityLost { .. } => "POSITIVITY_LOST",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::ConflictingConstraint { .. } => "CONFLICTING_CONSTRAINT",
            Error::Internal(_) => "INTERNAL_ERROR",
            Error::Io(_) => "IO_ERROR",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
