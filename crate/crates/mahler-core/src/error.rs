use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed text that does not match the expected grammar.
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally well-formed input that violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An extension was requested at the top level of the prime ladder.
    #[error(
        "level {level} is the top of the ladder (N = {ladder_len}); no prime remains to place"
    )]
    LevelExhausted { level: usize, ladder_len: usize },

    /// A configured size cap would be exceeded.
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    /// Two trees over different rationals were combined.
    #[error("trees describe different rationals: {left} vs {right}")]
    AlphaMismatch { left: String, right: String },

    /// No structure-preserving map exists between the given trees.
    #[error("no homomorphism: {0}")]
    HomomorphismNotFound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
