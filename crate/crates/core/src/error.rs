use thiserror::Error;

/// Errors produced by the engine and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid automatic structure: {0}")]
    StructureInvalid(String),

    #[error("unsupported automatic structure: {0}")]
    UnsupportedStructure(String),

    #[error("relation is not functional on the given word")]
    NotFunctional,

    #[error("word is not in the domain of the relation")]
    NotInDomain,

    #[error("membership queries require a certified graph")]
    Uncertified,

    #[error("no oracle available: {0}")]
    NoOracle(String),

    #[error("integer overflow in lattice arithmetic")]
    Overflow,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
