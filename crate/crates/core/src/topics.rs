//! Latent topic modeling by collapsed Gibbs sampling.
//!
//! Each token's topic is resampled from
//! `p(z = k | rest) ∝ (n_dk + alpha) * (n_kw + beta) / (n_k + beta * |V|)`
//! with the current token excluded from all counts. The sweep order and the
//! seeded generator make fitting fully deterministic.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::features::Vocabulary;

#[derive(Debug, Error)]
pub enum TopicsError {
    #[error("topic count must be at least 2, got {0}")]
    TooFewTopics(usize),
    #[error("corpus has no tokens")]
    EmptyCorpus,
    #[error("token index {index} out of range for vocabulary of {vocab_size}")]
    IndexOutOfRange { index: usize, vocab_size: usize },
    #[error("dirichlet hyperparameters must be positive (alpha {alpha}, beta {beta})")]
    InvalidHyperParameters { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LdaConfig {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: u32,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig {
            topics: 4,
            alpha: 0.1,
            beta: 0.01,
            iterations: 1000,
            seed: 42,
        }
    }
}

/// Mutable collapsed Gibbs state: per-token assignments plus the count
/// matrices they induce.
pub struct GibbsSampler {
    topics: usize,
    alpha: f64,
    beta: f64,
    docs: Vec<Vec<u32>>,
    assignments: Vec<Vec<u16>>,
    topic_word: Vec<Vec<u32>>,
    topic_totals: Vec<u64>,
    doc_topic: Vec<Vec<u32>>,
    total_tokens: u64,
    vocab: Arc<Vocabulary>,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl GibbsSampler {
    /// Seeded random initialization of all token assignments. `docs` holds
    /// vocabulary indices per token; empty documents are allowed and simply
    /// carry no assignments.
    pub fn init(docs: Vec<Vec<u32>>, vocab: Arc<Vocabulary>, config: &LdaConfig) -> Result<Self, TopicsError> {
        if config.topics < 2 {
            return Err(TopicsError::TooFewTopics(config.topics));
        }
        if !(config.alpha > 0.0 && config.beta > 0.0) {
            return Err(TopicsError::InvalidHyperParameters {
                alpha: config.alpha,
                beta: config.beta,
            });
        }
        let vocab_size = vocab.len();
        for doc in &docs {
            for &w in doc {
                if w as usize >= vocab_size {
                    return Err(TopicsError::IndexOutOfRange {
                        index: w as usize,
                        vocab_size,
                    });
                }
            }
        }
        if docs.iter().all(|d| d.is_empty()) {
            return Err(TopicsError::EmptyCorpus);
        }

        let k = config.topics;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut topic_word = vec![vec![0u32; vocab_size]; k];
        let mut topic_totals = vec![0u64; k];
        let mut doc_topic = vec![Vec::new(); docs.len()];
        let mut assignments = vec![Vec::new(); docs.len()];
        let mut total_tokens = 0u64;
        for (d, doc) in docs.iter().enumerate() {
            doc_topic[d] = vec![0u32; k];
            assignments[d] = Vec::with_capacity(doc.len());
            for &w in doc {
                let z = rng.gen_range(0..k);
                assignments[d].push(z as u16);
                topic_word[z][w as usize] += 1;
                topic_totals[z] += 1;
                doc_topic[d][z] += 1;
                total_tokens += 1;
            }
        }

        Ok(GibbsSampler {
            topics: k,
            alpha: config.alpha,
            beta: config.beta,
            docs,
            assignments,
            topic_word,
            topic_totals,
            doc_topic,
            total_tokens,
            vocab,
            rng,
            weights: vec![0.0; k],
        })
    }

    /// One full sweep: resample every token's topic once.
    pub fn sweep(&mut self) {
        let vocab_size = self.vocab.len() as f64;
        let beta_sum = self.beta * vocab_size;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i] as usize;
                let old = self.assignments[d][i] as usize;

                self.doc_topic[d][old] -= 1;
                self.topic_word[old][w] -= 1;
                self.topic_totals[old] -= 1;

                let mut total = 0.0;
                for k in 0..self.topics {
                    let weight = (self.doc_topic[d][k] as f64 + self.alpha)
                        * (self.topic_word[k][w] as f64 + self.beta)
                        / (self.topic_totals[k] as f64 + beta_sum);
                    self.weights[k] = weight;
                    total += weight;
                }
                let mut target = self.rng.gen::<f64>() * total;
                let mut new = self.topics - 1;
                for k in 0..self.topics {
                    target -= self.weights[k];
                    if target < 0.0 {
                        new = k;
                        break;
                    }
                }

                self.assignments[d][i] = new as u16;
                self.doc_topic[d][new] += 1;
                self.topic_word[new][w] += 1;
                self.topic_totals[new] += 1;
            }
        }
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn topic_word_counts(&self) -> &[Vec<u32>] {
        &self.topic_word
    }

    pub fn topic_totals(&self) -> &[u64] {
        &self.topic_totals
    }

    pub fn doc_topic_counts(&self) -> &[Vec<u32>] {
        &self.doc_topic
    }

    pub fn doc_token_counts(&self) -> Vec<u64> {
        self.docs.iter().map(|d| d.len() as u64).collect()
    }

    fn into_model(self, iterations_run: u32, seed: u64) -> LdaModel {
        LdaModel {
            topics: self.topics,
            alpha: self.alpha,
            beta: self.beta,
            topic_word: self.topic_word,
            topic_totals: self.topic_totals,
            doc_topic: self.doc_topic,
            assignments: self.assignments,
            vocab: self.vocab,
            iterations_run,
            seed,
        }
    }
}

/// Frozen sampler state after fitting; immutable and safe to share.
#[derive(Debug, Clone)]
pub struct LdaModel {
    topics: usize,
    alpha: f64,
    beta: f64,
    topic_word: Vec<Vec<u32>>,
    topic_totals: Vec<u64>,
    doc_topic: Vec<Vec<u32>>,
    assignments: Vec<Vec<u16>>,
    vocab: Arc<Vocabulary>,
    iterations_run: u32,
    seed: u64,
}

/// Run `config.iterations` full sweeps from a seeded initialization.
pub fn fit_lda(docs: Vec<Vec<u32>>, vocab: Arc<Vocabulary>, config: &LdaConfig) -> Result<LdaModel, TopicsError> {
    let mut sampler = GibbsSampler::init(docs, vocab, config)?;
    for _ in 0..config.iterations {
        sampler.sweep();
    }
    Ok(sampler.into_model(config.iterations, config.seed))
}

/// Ranked topic words in `word (probability)` form for display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordProbability {
    pub word: String,
    pub probability: f64,
}

impl WordProbability {
    /// Rendered as in the topic table: `scary (0.013)`.
    pub fn display(&self) -> String {
        format!("{} ({:.3})", self.word, self.probability)
    }
}

impl LdaModel {
    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn iterations_run(&self) -> u32 {
        self.iterations_run
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn topic_totals(&self) -> &[u64] {
        &self.topic_totals
    }

    pub fn topic_word_counts(&self) -> &[Vec<u32>] {
        &self.topic_word
    }

    pub fn doc_topic_counts(&self) -> &[Vec<u32>] {
        &self.doc_topic
    }

    pub fn assignments(&self) -> &[Vec<u16>] {
        &self.assignments
    }

    /// Smoothed topic-word probability
    /// `(n_kw + beta) / (n_k + beta * |V|)`; rows sum to 1 over the
    /// vocabulary.
    pub fn word_probability(&self, topic: usize, word: usize) -> f64 {
        (self.topic_word[topic][word] as f64 + self.beta)
            / (self.topic_totals[topic] as f64 + self.beta * self.vocab.len() as f64)
    }

    /// Top `k` words per topic by probability, ties lexicographic.
    pub fn top_words(&self, k: usize) -> Vec<Vec<WordProbability>> {
        (0..self.topics)
            .map(|topic| {
                let mut scored: Vec<WordProbability> = (0..self.vocab.len())
                    .map(|w| WordProbability {
                        word: self.vocab.word(w).to_string(),
                        probability: self.word_probability(topic, w),
                    })
                    .collect();
                scored.sort_by(|a, b| {
                    b.probability
                        .partial_cmp(&a.probability)
                        .unwrap()
                        .then_with(|| a.word.cmp(&b.word))
                });
                scored.truncate(k);
                scored
            })
            .collect()
    }
}

/// Aligned text table, one row per topic.
pub fn render_topic_table(top_words: &[Vec<WordProbability>]) -> String {
    let cells: Vec<Vec<String>> = top_words
        .iter()
        .map(|words| words.iter().map(WordProbability::display).collect())
        .collect();
    let columns = cells.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0usize; columns];
    for row in &cells {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::from("Topic");
    for (i, w) in widths.iter().enumerate() {
        out.push_str(&format!("  {:<width$}", format!("Word {}", i + 1), width = w));
    }
    out.push('\n');
    for (topic, row) in cells.iter().enumerate() {
        out.push_str(&format!("{:<5}", topic));
        for (i, cell) in row.iter().enumerate() {
            out.push_str(&format!("  {:<width$}", cell, width = widths[i]));
        }
        out.push('\n');
    }
    out
}

/// CSV rows `topic,rank,word,probability`.
pub fn write_topics_csv<W: Write>(top_words: &[Vec<WordProbability>], mut out: W) -> std::io::Result<()> {
    writeln!(out, "topic,rank,word,probability")?;
    for (topic, words) in top_words.iter().enumerate() {
        for (rank, wp) in words.iter().enumerate() {
            writeln!(out, "{},{},{},{:.6}", topic, rank + 1, wp.word, wp.probability)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::build_vocabulary_from_tokens;
    use approx::assert_relative_eq;

    fn vocab_of(words: &[&str]) -> Arc<Vocabulary> {
        let lists: Vec<Vec<String>> = words.iter().map(|w| vec![w.to_string()]).collect();
        let slices: Vec<&[String]> = lists.iter().map(Vec::as_slice).collect();
        Arc::new(build_vocabulary_from_tokens(slices, 1).unwrap())
    }

    fn assert_counts_consistent(s: &GibbsSampler) {
        for k in 0..s.topics() {
            let row_sum: u64 = s.topic_word_counts()[k].iter().map(|&c| c as u64).sum();
            assert_eq!(row_sum, s.topic_totals()[k]);
        }
        let doc_lens = s.doc_token_counts();
        for (d, row) in s.doc_topic_counts().iter().enumerate() {
            let sum: u64 = row.iter().map(|&c| c as u64).sum();
            assert_eq!(sum, doc_lens[d]);
        }
        let assigned: u64 = s.topic_totals().iter().sum();
        assert_eq!(assigned, s.total_tokens());
    }

    #[test]
    fn single_word_corpus_peaks_on_that_word() {
        let vocab = vocab_of(&["car"]);
        let docs = vec![vec![0u32]; 12];
        let model = fit_lda(docs, vocab, &LdaConfig { topics: 2, iterations: 20, ..LdaConfig::default() }).unwrap();
        for topic in model.top_words(1) {
            assert_eq!(topic[0].word, "car");
        }
    }

    #[test]
    fn counts_stay_conserved_across_sweeps() {
        let vocab = vocab_of(&["aa", "bb", "cc", "dd"]);
        let docs: Vec<Vec<u32>> = (0..20)
            .map(|i| (0..(1 + i % 4)).map(|j| ((i + j) % 4) as u32).collect())
            .collect();
        let mut sampler = GibbsSampler::init(docs, vocab, &LdaConfig { topics: 3, ..LdaConfig::default() }).unwrap();
        assert_counts_consistent(&sampler);
        for _ in 0..30 {
            sampler.sweep();
            assert_counts_consistent(&sampler);
        }
    }

    #[test]
    fn phi_rows_are_distributions() {
        let vocab = vocab_of(&["aa", "bb", "cc"]);
        let docs = vec![vec![0, 1, 2], vec![0, 0, 1], vec![2, 2]];
        let model = fit_lda(docs, vocab, &LdaConfig { topics: 2, iterations: 15, ..LdaConfig::default() }).unwrap();
        for k in 0..model.topics() {
            let sum: f64 = (0..model.vocab().len()).map(|w| model.word_probability(k, w)).sum();
            assert_relative_eq!(sum, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn two_cluster_toy_recovers_planted_vocabularies() {
        let vocab = vocab_of(&["apple", "fruit", "juice", "engine", "wheel", "brake"]);
        let food: Vec<u32> = ["apple", "fruit", "juice"].iter().map(|w| vocab.index_of(w).unwrap() as u32).collect();
        let auto: Vec<u32> = ["engine", "wheel", "brake"].iter().map(|w| vocab.index_of(w).unwrap() as u32).collect();
        let mut docs = Vec::new();
        for i in 0..100 {
            docs.push((0..8).map(|j| food[(i + j) % 3]).collect::<Vec<u32>>());
            docs.push((0..8).map(|j| auto[(i + j) % 3]).collect::<Vec<u32>>());
        }
        let cfg = LdaConfig { topics: 2, iterations: 200, seed: 42, ..LdaConfig::default() };
        let model = fit_lda(docs, vocab.clone(), &cfg).unwrap();

        let top = model.top_words(3);
        let food_set: Vec<&str> = vec!["apple", "fruit", "juice"];
        let cluster_of = |words: &[WordProbability]| -> Option<bool> {
            let in_food = words.iter().filter(|w| food_set.contains(&w.word.as_str())).count();
            match in_food {
                3 => Some(true),
                0 => Some(false),
                _ => None,
            }
        };
        let a = cluster_of(&top[0]).expect("topic 0 should be pure");
        let b = cluster_of(&top[1]).expect("topic 1 should be pure");
        assert_ne!(a, b, "topics should cover different clusters");

        for k in 0..2 {
            let wrong: f64 = (0..vocab.len())
                .filter(|&w| {
                    let is_food = food_set.contains(&vocab.word(w));
                    if k == 0 { is_food != a } else { is_food != b }
                })
                .map(|w| model.word_probability(k, w))
                .sum();
            assert!(wrong < 0.2, "topic {k} has cross-cluster mass {wrong}");
        }
    }

    #[test]
    fn fitting_is_deterministic() {
        let vocab = vocab_of(&["aa", "bb", "cc"]);
        let docs = vec![vec![0, 1, 2, 0], vec![1, 1, 2], vec![0, 2]];
        let cfg = LdaConfig { topics: 2, iterations: 25, ..LdaConfig::default() };
        let a = fit_lda(docs.clone(), vocab.clone(), &cfg).unwrap();
        let b = fit_lda(docs, vocab, &cfg).unwrap();
        assert_eq!(a.assignments(), b.assignments());
        assert_eq!(a.topic_word_counts(), b.topic_word_counts());
        assert_eq!(a.top_words(3), b.top_words(3));
    }

    #[test]
    fn rejects_bad_configs() {
        let vocab = vocab_of(&["aa"]);
        assert!(matches!(
            fit_lda(vec![vec![0]], vocab.clone(), &LdaConfig { topics: 1, ..LdaConfig::default() }),
            Err(TopicsError::TooFewTopics(1))
        ));
        assert!(matches!(
            fit_lda(vec![], vocab.clone(), &LdaConfig::default()),
            Err(TopicsError::EmptyCorpus)
        ));
        assert!(matches!(
            fit_lda(vec![vec![]], vocab.clone(), &LdaConfig::default()),
            Err(TopicsError::EmptyCorpus)
        ));
        assert!(matches!(
            fit_lda(vec![vec![5]], vocab.clone(), &LdaConfig::default()),
            Err(TopicsError::IndexOutOfRange { index: 5, vocab_size: 1 })
        ));
        assert!(matches!(
            fit_lda(vec![vec![0]], vocab, &LdaConfig { alpha: 0.0, ..LdaConfig::default() }),
            Err(TopicsError::InvalidHyperParameters { .. })
        ));
    }

    #[test]
    fn rendering_formats_probabilities_to_three_decimals() {
        let words = vec![vec![
            WordProbability { word: "scary".into(), probability: 0.0131 },
            WordProbability { word: "card".into(), probability: 0.0125 },
        ]];
        assert_eq!(words[0][0].display(), "scary (0.013)");
        let table = render_topic_table(&words);
        assert!(table.contains("scary (0.013)"));
        assert!(table.contains("card (0.013)"));
        assert!(table.starts_with("Topic"));

        let mut csv_out = Vec::new();
        write_topics_csv(&words, &mut csv_out).unwrap();
        let text = String::from_utf8(csv_out).unwrap();
        assert!(text.starts_with("topic,rank,word,probability\n"));
        assert!(text.contains("0,1,scary,0.013100"));
    }
}
