//! Linear SVM trained by primal stochastic subgradient descent on the
//! L2-regularized hinge loss, with the 1/(lambda*t) step schedule.
//!
//! The bias is trained as a constant feature, so it decays and regularizes
//! exactly like the weights; otherwise the huge early steps (eta_1 = 1/lambda)
//! would leave it stranded far from the optimum. The weight vector is kept
//! as `scale * direction` so the per-step shrink `w <- (1 - eta*lambda) w`
//! costs O(1) instead of O(|V|).

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::SentimentLabel;
use crate::features::{to_bow, SparseVector, Vocabulary};
use crate::preprocess::Document;

use super::ClassifyError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: u32,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            lambda: 1e-4,
            epochs: 10,
            seed: 42,
        }
    }
}

/// Trained linear separator over bag-of-words counts. Labels map to
/// negative = -1, positive = +1.
#[derive(Debug, Clone)]
pub struct LinearSvm {
    weights: Vec<f64>,
    bias: f64,
    lambda: f64,
    epochs: u32,
    seed: u64,
    vocab: Arc<Vocabulary>,
}

fn signed_label(label: SentimentLabel) -> f64 {
    match label {
        SentimentLabel::Negative => -1.0,
        SentimentLabel::Positive => 1.0,
    }
}

pub fn train_linear_svm(
    train: &[Document],
    vocab: Arc<Vocabulary>,
    config: &SvmConfig,
) -> Result<LinearSvm, ClassifyError> {
    if !(config.lambda > 0.0 && config.lambda.is_finite()) {
        return Err(ClassifyError::InvalidLambda(config.lambda));
    }
    if config.epochs == 0 {
        return Err(ClassifyError::InvalidEpochs);
    }
    if train.is_empty() {
        return Err(ClassifyError::EmptyTrainingSet);
    }
    for label in [SentimentLabel::Negative, SentimentLabel::Positive] {
        if !train.iter().any(|d| d.label == label) {
            return Err(ClassifyError::MissingClass(label));
        }
    }

    let lambda = config.lambda;
    let features: Vec<SparseVector> = train.iter().map(|d| to_bow(d, &vocab)).collect();
    let targets: Vec<f64> = train.iter().map(|d| signed_label(d.label)).collect();

    let mut direction = vec![0.0f64; vocab.len()];
    let mut bias_direction = 0.0f64;
    let mut scale = 1.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut t: u64 = 0;

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let decay = 1.0 - eta * lambda; // = 1 - 1/t, zero only at t = 1
            if decay > 0.0 {
                scale *= decay;
            } else {
                // w is still the zero vector at t = 1, so shrinking it to
                // zero just resets the representation.
                scale = 1.0;
                direction.iter_mut().for_each(|v| *v = 0.0);
                bias_direction = 0.0;
            }
            let margin = targets[i] * (scale * (features[i].dot_dense(&direction) + bias_direction));
            if margin < 1.0 {
                let step = eta * targets[i] / scale;
                for &(j, x) in features[i].entries() {
                    direction[j] += step * x;
                }
                bias_direction += step;
            }
        }
    }

    let weights = direction.iter().map(|&v| v * scale).collect();
    Ok(LinearSvm {
        weights,
        bias: bias_direction * scale,
        lambda,
        epochs: config.epochs,
        seed: config.seed,
        vocab,
    })
}

impl LinearSvm {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn epochs(&self) -> u32 {
        self.epochs
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Signed distance-like score `w . x + b`.
    pub fn decision_value(&self, doc: &Document) -> f64 {
        to_bow(doc, &self.vocab).dot_dense(&self.weights) + self.bias
    }

    /// Predicted label and `|w . x + b|`; a zero score maps to negative.
    pub fn predict(&self, doc: &Document) -> (SentimentLabel, f64) {
        let value = self.decision_value(doc);
        let label = if value > 0.0 {
            SentimentLabel::Positive
        } else {
            SentimentLabel::Negative
        };
        (label, value.abs())
    }

    /// Regularized hinge objective `lambda/2 (||w||^2 + b^2) + mean hinge
    /// loss` over `docs`; the bias term appears in the norm because it is
    /// trained as a constant feature. At zero weights and bias this
    /// equals 1.
    pub fn objective(&self, docs: &[Document]) -> f64 {
        objective_at(&self.weights, self.bias, self.lambda, docs, &self.vocab)
    }
}

pub(crate) fn objective_at(
    weights: &[f64],
    bias: f64,
    lambda: f64,
    docs: &[Document],
    vocab: &Vocabulary,
) -> f64 {
    let norm_sq: f64 = weights.iter().map(|w| w * w).sum::<f64>() + bias * bias;
    let hinge_sum: f64 = docs
        .iter()
        .map(|d| {
            let margin = signed_label(d.label) * (to_bow(d, vocab).dot_dense(weights) + bias);
            (1.0 - margin).max(0.0)
        })
        .sum();
    lambda / 2.0 * norm_sq + hinge_sum / docs.len() as f64
}
