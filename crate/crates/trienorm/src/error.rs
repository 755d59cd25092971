use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty word")]
    EmptyWord,
    #[error("character {ch:?} in {word:?} is outside a-z")]
    OutOfAlphabet { word: String, ch: char },
    #[error("malformed trie data at byte {offset}: {reason}")]
    Format { offset: usize, reason: String },
    #[error("corpus error: {0}")]
    Corpus(String),
    #[error("duplicate corpus word {0:?}")]
    DuplicateWord(String),
    #[error("invalid checkpoint list: {0}")]
    Checkpoints(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown edit type {0:?}")]
    UnknownEditType(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
