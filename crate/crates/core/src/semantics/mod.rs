//! Corpus-trained word embeddings and dictionary-based entity extraction.

mod embedding;
mod ner;

pub use embedding::{pair_gradients, pair_loss, train_sgns, EmbeddingMatrix, SgnsConfig};
pub use ner::{entity_frequencies, extract_entities, Entity, EntityCount, EntityKind, Gazetteer};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("embedding vocabulary is empty (no token reaches min_count {min_count})")]
    EmptyVocabulary { min_count: u32 },
    #[error("word {0:?} is not in the embedding vocabulary")]
    UnknownWord(String),
    #[error("embedding dimension must be at least 1")]
    InvalidDimension,
    #[error("failed to read gazetteer: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed gazetteer row {line}: {reason}")]
    MalformedGazetteerRow { line: u64, reason: String },
    #[error("duplicate gazetteer surface form {0:?}")]
    DuplicateSurface(String),
}
