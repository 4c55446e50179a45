use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Every variant maps to a stable machine-readable [`Error::kind`] string,
/// which the command-line front end uses for its error lines and exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown leaf label `{0}`")]
    UnknownLabel(String),

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("class violation at step `{step}`: {msg}")]
    ClassViolation { step: &'static str, msg: String },

    #[error("not a tree metric: {0}")]
    NotATreeMetric(String),

    #[error("conditioning event has probability zero")]
    EmptyEvent,

    #[error("invalid split sequence at index {index}: {msg}")]
    InvalidSplit { index: usize, msg: String },

    #[error("input is not in the model: {0}")]
    NotInModel(String),

    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl Error {
    /// Short, stable identifier for the error category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } | Error::InvalidSplit { .. } => "parse",
            Error::UnknownLabel(_) | Error::InvalidTree(_) | Error::Precondition(_) => {
                "precondition"
            }
            Error::Infeasible(_) => "infeasible",
            Error::ClassViolation { .. }
            | Error::NotATreeMetric(_)
            | Error::EmptyEvent
            | Error::NotInModel(_)
            | Error::Inconsistent(_) => "class-violation",
        }
    }

    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub(crate) fn class(step: &'static str, msg: impl Into<String>) -> Self {
        Error::ClassViolation {
            step,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
