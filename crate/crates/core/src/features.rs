//! Vocabulary construction, bag-of-words vectors, and TF-IDF term ranking.
//!
//! Vocabulary indices are assigned in descending document-frequency order
//! with lexicographic tie-breaks, so identical corpora always produce
//! identical indexings.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preprocess::Document;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("vocabulary is empty (no token reaches min_count {min_count})")]
    EmptyVocabulary { min_count: u32 },
    #[error("k must be at least 1")]
    InvalidK,
}

/// Word <-> index bijection with per-word document frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    word_to_index: HashMap<String, usize>,
    index_to_word: Vec<String>,
    doc_freq: Vec<u32>,
    total_docs: usize,
    min_count: u32,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.index_to_word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index_to_word.is_empty()
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.word_to_index.get(word).copied()
    }

    pub fn word(&self, index: usize) -> &str {
        &self.index_to_word[index]
    }

    pub fn doc_freq(&self, index: usize) -> u32 {
        self.doc_freq[index]
    }

    pub fn total_docs(&self) -> usize {
        self.total_docs
    }

    pub fn min_count(&self) -> u32 {
        self.min_count
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.index_to_word.iter().map(String::as_str)
    }

    /// Smoothed inverse document frequency: `ln((1+N)/(1+df)) + 1`.
    /// Always >= 1, so present terms never get zero or negative weight.
    pub fn idf(&self, index: usize) -> f64 {
        let n = self.total_docs as f64;
        let df = self.doc_freq[index] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }
}

/// Build a vocabulary over every token occurring in at least `min_count`
/// documents. Token-less documents are excluded entirely: they neither
/// contribute frequencies nor count toward `total_docs`.
pub fn build_vocabulary(docs: &[Document], min_count: u32) -> Result<Vocabulary, FeatureError> {
    build_vocabulary_from_tokens(docs.iter().map(|d| d.tokens.as_slice()), min_count)
}

/// Same as [`build_vocabulary`] but over raw token lists.
pub fn build_vocabulary_from_tokens<'a, I>(token_lists: I, min_count: u32) -> Result<Vocabulary, FeatureError>
where
    I: IntoIterator<Item = &'a [String]>,
{
    let mut df: HashMap<&str, u32> = HashMap::new();
    let mut total_docs = 0usize;
    let mut seen: Vec<&str> = Vec::new();
    let token_lists: Vec<&[String]> = token_lists.into_iter().collect();
    for tokens in &token_lists {
        if tokens.is_empty() {
            continue;
        }
        total_docs += 1;
        seen.clear();
        for token in tokens.iter() {
            if !seen.contains(&token.as_str()) {
                seen.push(token);
                *df.entry(token).or_insert(0) += 1;
            }
        }
    }

    let mut entries: Vec<(&str, u32)> = df.into_iter().filter(|&(_, c)| c >= min_count).collect();
    if entries.is_empty() {
        return Err(FeatureError::EmptyVocabulary { min_count });
    }
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut word_to_index = HashMap::with_capacity(entries.len());
    let mut index_to_word = Vec::with_capacity(entries.len());
    let mut doc_freq = Vec::with_capacity(entries.len());
    for (i, (word, count)) in entries.into_iter().enumerate() {
        word_to_index.insert(word.to_string(), i);
        index_to_word.push(word.to_string());
        doc_freq.push(count);
    }
    Ok(Vocabulary {
        word_to_index,
        index_to_word,
        doc_freq,
        total_docs,
        min_count,
    })
}

/// Sparse feature vector: strictly increasing indices, no explicit zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Build from (index, weight) pairs; zero weights are dropped and
    /// duplicate indices summed.
    pub fn from_pairs(mut pairs: Vec<(usize, f64)>) -> Self {
        pairs.sort_by_key(|&(i, _)| i);
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for (i, w) in pairs {
            match entries.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => entries.push((i, w)),
            }
        }
        entries.retain(|&(_, w)| w != 0.0);
        SparseVector { entries }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, w)| w * dense[i]).sum()
    }
}

/// Bag-of-words counts for one document; out-of-vocabulary tokens are ignored.
pub fn to_bow(doc: &Document, vocab: &Vocabulary) -> SparseVector {
    to_bow_tokens(&doc.tokens, vocab)
}

pub fn to_bow_tokens(tokens: &[String], vocab: &Vocabulary) -> SparseVector {
    let pairs = tokens
        .iter()
        .filter_map(|t| vocab.index_of(t))
        .map(|i| (i, 1.0))
        .collect();
    SparseVector::from_pairs(pairs)
}

/// Corpus-level TF-IDF ranking: a word's score is the sum over documents of
/// `tf(t,d) * idf(t)`, i.e. its total corpus frequency times its smoothed
/// idf. Returns the top `k` (or the full ranking when `k` exceeds the
/// vocabulary), ties broken lexicographically.
pub fn tfidf_rank(docs: &[Document], vocab: &Vocabulary, k: usize) -> Result<Vec<(String, f64)>, FeatureError> {
    if k == 0 {
        return Err(FeatureError::InvalidK);
    }
    let mut total_tf = vec![0u64; vocab.len()];
    for doc in docs {
        for token in &doc.tokens {
            if let Some(i) = vocab.index_of(token) {
                total_tf[i] += 1;
            }
        }
    }
    let mut scored: Vec<(String, f64)> = (0..vocab.len())
        .filter(|&i| total_tf[i] > 0)
        .map(|i| (vocab.word(i).to_string(), total_tf[i] as f64 * vocab.idf(i)))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored)
}

/// Streaming term statistics for ranking without materializing documents.
/// Produces the same scores as [`tfidf_rank`] on identical input.
#[derive(Debug, Default, Clone)]
pub struct TermStats {
    doc_freq: HashMap<String, u32>,
    term_freq: HashMap<String, u64>,
    total_docs: usize,
}

impl TermStats {
    pub fn new() -> Self {
        TermStats::default()
    }

    /// Token-less documents are ignored, mirroring [`build_vocabulary`].
    pub fn add_doc(&mut self, tokens: &[String]) {
        if tokens.is_empty() {
            return;
        }
        self.total_docs += 1;
        let mut seen: Vec<&str> = Vec::new();
        for token in tokens {
            *self.term_freq.entry(token.clone()).or_insert(0) += 1;
            if !seen.contains(&token.as_str()) {
                seen.push(token);
                *self.doc_freq.entry(token.clone()).or_insert(0) += 1;
            }
        }
    }

    pub fn total_docs(&self) -> usize {
        self.total_docs
    }

    pub fn rank(&self, min_count: u32, k: usize) -> Result<Vec<(String, f64)>, FeatureError> {
        if k == 0 {
            return Err(FeatureError::InvalidK);
        }
        let n = self.total_docs as f64;
        let mut scored: Vec<(String, f64)> = self
            .doc_freq
            .iter()
            .filter(|&(_, &df)| df >= min_count)
            .map(|(word, &df)| {
                let idf = ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0;
                (word.clone(), self.term_freq[word] as f64 * idf)
            })
            .collect();
        if scored.is_empty() {
            return Err(FeatureError::EmptyVocabulary { min_count });
        }
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }
}
