//! Skip-gram embeddings trained with negative sampling.
//!
//! For each center/context pair inside a symmetric window the objective is
//! `-ln sigmoid(u_ctx . v_ctr) - sum_i ln sigmoid(-u_neg_i . v_ctr)` with
//! negatives drawn from the unigram distribution raised to 0.75. Training is
//! single-threaded and fully seeded, so identical inputs give bitwise
//! identical matrices.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::{build_vocabulary, Vocabulary};
use crate::preprocess::Document;

use super::SemanticsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SgnsConfig {
    /// Embedding dimension.
    pub dim: usize,
    /// Symmetric window size.
    pub window: usize,
    /// Negative samples per pair.
    pub negatives: usize,
    pub epochs: u32,
    /// Step size decays linearly from `initial_step` to `final_step` over
    /// all pairs of all epochs.
    pub initial_step: f64,
    pub final_step: f64,
    /// Words below this document count are dropped from the vocabulary.
    pub min_count: u32,
    pub seed: u64,
    /// When set, frequent tokens are randomly thinned with keep probability
    /// `sqrt(threshold / frequency)` before training.
    pub subsample_threshold: Option<f64>,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_step: 0.025,
            final_step: 1e-4,
            min_count: 5,
            seed: 42,
            subsample_threshold: None,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Loss of a single center/context pair with its negative draws.
pub fn pair_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut loss = -sigmoid(dot(center, context)).ln();
    for neg in negatives {
        loss -= sigmoid(-dot(center, neg)).ln();
    }
    loss
}

/// Analytic gradients of [`pair_loss`] with respect to the center vector,
/// the context vector, and each negative vector.
pub fn pair_gradients(
    center: &[f64],
    context: &[f64],
    negatives: &[&[f64]],
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let dim = center.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut grad_center = vec![0.0; dim];
    let g_pos = sigmoid(dot(center, context)) - 1.0;
    let grad_context: Vec<f64> = center.iter().map(|&v| g_pos * v).collect();
    for t in 0..dim {
        grad_center[t] += g_pos * context[t];
    }
    let mut grad_negatives = Vec::with_capacity(negatives.len());
    for neg in negatives {
        let g_neg = sigmoid(dot(center, neg));
        grad_negatives.push(center.iter().map(|&v| g_neg * v).collect());
        for t in 0..dim {
            grad_center[t] += g_neg * neg[t];
        }
    }
    (grad_center, grad_context, grad_negatives)
}

/// Trained embedding matrices. Similarity queries read the input vectors.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    input: Vec<f64>,
    output: Vec<f64>,
    dim: usize,
    config: SgnsConfig,
    vocab: Arc<Vocabulary>,
}

/// Cumulative unigram^0.75 table for negative draws.
struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(counts: &[u64]) -> Self {
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut acc = 0.0;
        for &c in counts {
            acc += (c as f64).powf(0.75);
            cumulative.push(acc);
        }
        NoiseTable { cumulative }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty noise table");
        let r = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= r).min(self.cumulative.len() - 1)
    }
}

/// Train embeddings over the documents' token streams. The vocabulary is
/// built here with `config.min_count`; out-of-vocabulary tokens are dropped
/// from the training stream.
pub fn train_sgns(docs: &[Document], config: &SgnsConfig) -> Result<EmbeddingMatrix, SemanticsError> {
    if config.dim == 0 {
        return Err(SemanticsError::InvalidDimension);
    }
    let vocab = Arc::new(
        build_vocabulary(docs, config.min_count).map_err(|_| SemanticsError::EmptyVocabulary {
            min_count: config.min_count,
        })?,
    );
    let mut encoded: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.tokens.iter().filter_map(|t| vocab.index_of(t)).collect())
        .filter(|e: &Vec<usize>| !e.is_empty())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut counts = vec![0u64; vocab.len()];
    for doc in &encoded {
        for &w in doc {
            counts[w] += 1;
        }
    }

    if let Some(threshold) = config.subsample_threshold {
        let total: u64 = counts.iter().sum();
        for doc in &mut encoded {
            doc.retain(|&w| {
                let freq = counts[w] as f64 / total as f64;
                let keep = (threshold / freq).sqrt().min(1.0);
                rng.gen::<f64>() < keep
            });
        }
        encoded.retain(|doc| !doc.is_empty());
        counts.iter_mut().for_each(|c| *c = 0);
        for doc in &encoded {
            for &w in doc {
                counts[w] += 1;
            }
        }
    }

    let dim = config.dim;
    let mut input = vec![0.0f64; vocab.len() * dim];
    let output = vec![0.0f64; vocab.len() * dim];
    let spread = 0.5 / dim as f64;
    for v in input.iter_mut() {
        *v = rng.gen_range(-spread..=spread);
    }

    let mut matrix = EmbeddingMatrix {
        input,
        output,
        dim,
        config: *config,
        vocab,
    };
    if counts.iter().all(|&c| c == 0) {
        return Ok(matrix);
    }

    let pairs_in = |doc: &[usize]| -> u64 {
        let len = doc.len();
        (0..len)
            .map(|i| {
                let lo = i.saturating_sub(config.window);
                let hi = (i + config.window).min(len - 1);
                (hi - lo) as u64
            })
            .sum()
    };
    let total_pairs: u64 = encoded.iter().map(|d| pairs_in(d)).sum::<u64>() * config.epochs as u64;
    if total_pairs == 0 {
        return Ok(matrix);
    }

    let noise = NoiseTable::new(&counts);
    let step_span = config.initial_step - config.final_step;
    let mut seen_pairs: u64 = 0;
    let mut grad_center = vec![0.0f64; dim];
    let mut drawn = vec![0usize; config.negatives];

    for _ in 0..config.epochs {
        for doc in &encoded {
            let len = doc.len();
            for i in 0..len {
                let lo = i.saturating_sub(config.window);
                let hi = (i + config.window).min(len - 1);
                for j in lo..=hi {
                    if j == i {
                        continue;
                    }
                    let lr = (config.initial_step
                        - step_span * (seen_pairs as f64 / total_pairs as f64))
                        .max(config.final_step);
                    seen_pairs += 1;
                    for slot in drawn.iter_mut() {
                        *slot = noise.draw(&mut rng);
                    }
                    matrix.update_pair(doc[i], doc[j], &drawn, lr, &mut grad_center);
                }
            }
        }
    }
    Ok(matrix)
}

impl EmbeddingMatrix {
    /// One SGD step on a center/context pair: context and negative output
    /// rows move against their own gradients using the pre-update center
    /// vector, then the center input row absorbs the accumulated gradient.
    fn update_pair(&mut self, center: usize, context: usize, negatives: &[usize], lr: f64, grad_center: &mut [f64]) {
        let dim = self.dim;
        let base_c = center * dim;
        grad_center.iter_mut().for_each(|g| *g = 0.0);
        for (slot, &word) in std::iter::once(&context).chain(negatives.iter()).enumerate() {
            let target = if slot == 0 { 1.0 } else { 0.0 };
            let center_row = &self.input[base_c..base_c + dim];
            let output_row = &mut self.output[word * dim..word * dim + dim];
            let dot: f64 = center_row.iter().zip(output_row.iter()).map(|(a, b)| a * b).sum();
            let g = sigmoid(dot) - target;
            for ((grad, out), &ctr) in grad_center.iter_mut().zip(output_row.iter_mut()).zip(center_row) {
                *grad += g * *out;
                *out -= lr * g * ctr;
            }
        }
        for (v, grad) in self.input[base_c..base_c + dim].iter_mut().zip(grad_center.iter()) {
            *v -= lr * grad;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn config(&self) -> &SgnsConfig {
        &self.config
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Input vector of a vocabulary index.
    pub fn vector(&self, index: usize) -> &[f64] {
        &self.input[index * self.dim..(index + 1) * self.dim]
    }

    pub fn output_vector(&self, index: usize) -> &[f64] {
        &self.output[index * self.dim..(index + 1) * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.input.iter().chain(self.output.iter()).all(|v| v.is_finite())
    }

    /// Cosine similarity between two vocabulary words' input vectors.
    pub fn cosine(&self, a: usize, b: usize) -> f64 {
        cosine(self.vector(a), self.vector(b))
    }

    /// Top `k` nearest words by cosine over input vectors. The query word is
    /// excluded; ties break lexicographically. Returns
    /// `min(k, |V| - 1)` entries sorted by non-increasing similarity.
    pub fn most_similar(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>, SemanticsError> {
        let query = self
            .vocab
            .index_of(word)
            .ok_or_else(|| SemanticsError::UnknownWord(word.to_string()))?;
        let mut scored: Vec<(String, f64)> = (0..self.vocab.len())
            .filter(|&i| i != query)
            .map(|i| (self.vocab.word(i).to_string(), self.cosine(query, i)))
            .collect();
        scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored)
    }

    /// Text export: first line `|V| dim`, then one `word v1 ... vd` row per
    /// vocabulary entry.
    pub fn write_text<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{} {}", self.vocab.len(), self.dim)?;
        for i in 0..self.vocab.len() {
            write!(out, "{}", self.vocab.word(i))?;
            for v in self.vector(i) {
                write!(out, " {v:.6}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}
