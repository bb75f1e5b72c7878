use thiserror::Error;

/// Errors raised while reading or resolving a model.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum ModelError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("grading mismatch: {0}")]
    Grading(String),
    #[error("unknown field or symbol '{0}'")]
    UnknownField(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}

/// A failure of one pipeline stage, tagged with the stage name.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("stage {stage}: {msg}")]
pub struct StageError {
    pub stage: &'static str,
    pub msg: String,
}

impl StageError {
    pub fn new(stage: &'static str, e: impl std::fmt::Display) -> Self {
        StageError { stage, msg: e.to_string() }
    }
}
