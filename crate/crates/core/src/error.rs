use thiserror::Error;

use crate::words::Word;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid algebra parameters m={m}, k={k}: need 2 <= k <= m")]
    InvalidParams { m: usize, k: usize },

    #[error("letter {letter} out of range 1..={m}")]
    LetterOutOfRange { letter: usize, m: usize },

    #[error("word {0} is admissible, no decreasing run to expand")]
    AlreadyAdmissible(Word),

    #[error("word {0} is not admissible")]
    NotAdmissible(Word),

    #[error("series is not invertible: constant term is {0}, expected 1")]
    NonInvertible(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("matrix file: {0}")]
    MatrixFile(String),
}

impl Error {
    pub(crate) fn parse(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Parse {
            what,
            detail: detail.into(),
        }
    }
}
