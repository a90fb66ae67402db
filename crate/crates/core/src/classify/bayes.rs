//! Multinomial Naive Bayes with Laplace smoothing.

use std::sync::Arc;

use crate::corpus::SentimentLabel;
use crate::features::Vocabulary;
use crate::preprocess::Document;

use super::ClassifyError;

const NEG: usize = 0;
const POS: usize = 1;

fn class_of(label: SentimentLabel) -> usize {
    match label {
        SentimentLabel::Negative => NEG,
        SentimentLabel::Positive => POS,
    }
}

/// Trained multinomial Naive Bayes model.
///
/// Per class, `exp` of the word log-likelihoods sums to 1 over the
/// vocabulary, and the priors exponentiate to a distribution.
#[derive(Debug, Clone)]
pub struct NaiveBayesModel {
    class_log_prior: [f64; 2],
    word_log_likelihood: [Vec<f64>; 2],
    alpha: f64,
    vocab: Arc<Vocabulary>,
}

/// Train with word likelihoods `P(w|c) = (count(w,c) + alpha) /
/// (total_c + alpha * |V|)` and priors equal to class document fractions.
pub fn train_naive_bayes(
    train: &[Document],
    vocab: Arc<Vocabulary>,
    alpha: f64,
) -> Result<NaiveBayesModel, ClassifyError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ClassifyError::InvalidAlpha(alpha));
    }
    if train.is_empty() {
        return Err(ClassifyError::EmptyTrainingSet);
    }
    let v = vocab.len();
    let mut word_counts = [vec![0u64; v], vec![0u64; v]];
    let mut doc_counts = [0u64; 2];
    for doc in train {
        let c = class_of(doc.label);
        doc_counts[c] += 1;
        for token in &doc.tokens {
            if let Some(i) = vocab.index_of(token) {
                word_counts[c][i] += 1;
            }
        }
    }
    for (label, &count) in [SentimentLabel::Negative, SentimentLabel::Positive]
        .iter()
        .zip(doc_counts.iter())
    {
        if count == 0 {
            return Err(ClassifyError::MissingClass(*label));
        }
    }

    let total_docs = train.len() as f64;
    let class_log_prior = [
        (doc_counts[NEG] as f64 / total_docs).ln(),
        (doc_counts[POS] as f64 / total_docs).ln(),
    ];
    let word_log_likelihood = [NEG, POS].map(|c| {
        let total: u64 = word_counts[c].iter().sum();
        let denom = total as f64 + alpha * v as f64;
        word_counts[c]
            .iter()
            .map(|&n| ((n as f64 + alpha) / denom).ln())
            .collect()
    });

    Ok(NaiveBayesModel {
        class_log_prior,
        word_log_likelihood,
        alpha,
        vocab,
    })
}

impl NaiveBayesModel {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn log_prior(&self, label: SentimentLabel) -> f64 {
        self.class_log_prior[class_of(label)]
    }

    pub fn word_log_likelihood(&self, label: SentimentLabel, index: usize) -> f64 {
        self.word_log_likelihood[class_of(label)][index]
    }

    /// Log of `P(c) * prod P(w|c)` for each class, out-of-vocabulary tokens
    /// skipped. Order: negative, positive.
    pub fn log_joint(&self, tokens: &[String]) -> [f64; 2] {
        let mut scores = self.class_log_prior;
        for token in tokens {
            if let Some(i) = self.vocab.index_of(token) {
                scores[NEG] += self.word_log_likelihood[NEG][i];
                scores[POS] += self.word_log_likelihood[POS][i];
            }
        }
        scores
    }

    /// Most probable label and its posterior probability. Exact ties go to
    /// negative. An empty or all-out-of-vocabulary document falls back to
    /// the prior argmax.
    pub fn predict(&self, doc: &Document) -> (SentimentLabel, f64) {
        self.predict_tokens(&doc.tokens)
    }

    pub fn predict_tokens(&self, tokens: &[String]) -> (SentimentLabel, f64) {
        let joint = self.log_joint(tokens);
        let label = if joint[POS] > joint[NEG] {
            SentimentLabel::Positive
        } else {
            SentimentLabel::Negative
        };
        let max = joint[NEG].max(joint[POS]);
        let log_norm = max + ((joint[NEG] - max).exp() + (joint[POS] - max).exp()).ln();
        let posterior = (joint[class_of(label)] - log_norm).exp();
        (label, posterior)
    }
}
