use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A float-mode computation produced a non-finite value.
    #[error("float overflow at index {index}")]
    Overflow { index: usize },

    /// Weight sequences must have every term nonzero.
    #[error("weight v_{index} is zero")]
    ZeroWeight { index: usize },

    #[error("{what} has length {got}, need at least {needed}")]
    LengthMismatch {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    /// Composition is only defined for a shared step parameter.
    #[error("step parameters differ: {left} vs {right}")]
    StepMismatch { left: String, right: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Whether the error is a violated input invariant (as opposed to
    /// overflow or malformed input).
    pub fn is_invariant_violation(&self) -> bool {
        matches!(
            self,
            Error::ZeroWeight { .. } | Error::LengthMismatch { .. } | Error::StepMismatch { .. }
        )
    }
}
