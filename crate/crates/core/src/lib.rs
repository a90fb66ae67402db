//! Batch sentiment-trend analytics for labeled tweet corpora.
//!
//! The crate ingests the six-column Sentiment140 CSV, filters tweets by a
//! product keyword, and runs a deterministic analysis pipeline on the
//! matching subset:
//!
//! - [`corpus`] — CSV parsing, timestamp extraction, keyword filtering
//! - [`preprocess`] — text normalization, tokenization, size categories
//! - [`features`] — vocabulary, bag-of-words vectors, TF-IDF term ranking
//! - [`classify`] — multinomial Naive Bayes, linear SVM, prediction import,
//!   and precision/recall/F1 reports
//! - [`trends`] — sentiment counts bucketed by hour, weekday, month, and
//!   text-size category
//! - [`semantics`] — skip-gram word embeddings with negative sampling and
//!   gazetteer-based entity extraction
//! - [`topics`] — LDA topic modeling via collapsed Gibbs sampling
//! - [`pipeline`] — end-to-end orchestration and report emission
//!
//! Every stage is seeded and single-threaded by default, so identical
//! inputs and configuration produce identical outputs.

pub mod classify;
pub mod corpus;
pub mod features;
pub mod pipeline;
pub mod preprocess;
pub mod semantics;
pub mod topics;
pub mod trends;

pub use corpus::SentimentLabel;
