//! Confusion counts and the precision/recall/F1 classification report.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::corpus::SentimentLabel;
use crate::preprocess::Document;

use super::{ClassifyError, PredictionSet};

/// Binary confusion counts; field names read "gold as predicted".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub neg_as_neg: u64,
    pub neg_as_pos: u64,
    pub pos_as_neg: u64,
    pub pos_as_pos: u64,
}

impl ConfusionMatrix {
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (SentimentLabel, SentimentLabel)>,
    {
        let mut cm = ConfusionMatrix::default();
        for (gold, pred) in pairs {
            match (gold, pred) {
                (SentimentLabel::Negative, SentimentLabel::Negative) => cm.neg_as_neg += 1,
                (SentimentLabel::Negative, SentimentLabel::Positive) => cm.neg_as_pos += 1,
                (SentimentLabel::Positive, SentimentLabel::Negative) => cm.pos_as_neg += 1,
                (SentimentLabel::Positive, SentimentLabel::Positive) => cm.pos_as_pos += 1,
            }
        }
        cm
    }

    pub fn total(&self) -> u64 {
        self.neg_as_neg + self.neg_as_pos + self.pos_as_neg + self.pos_as_pos
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Per-class and aggregate metrics. Values are kept at full precision;
/// rounding happens only in [`EvalReport::render_text`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub negative: ClassMetrics,
    pub positive: ClassMetrics,
    pub accuracy: f64,
    pub macro_avg: AverageMetrics,
    pub weighted_avg: AverageMetrics,
    pub total_support: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

impl EvalReport {
    /// Derive every metric from raw confusion counts. A class that is never
    /// predicted gets precision 0 by convention. Weighted recall reduces
    /// algebraically to accuracy, so it is computed from the totals directly
    /// and the equality holds exactly.
    pub fn from_confusion(cm: &ConfusionMatrix) -> EvalReport {
        let support_neg = cm.neg_as_neg + cm.neg_as_pos;
        let support_pos = cm.pos_as_neg + cm.pos_as_pos;
        let total = cm.total();

        let precision_neg = ratio(cm.neg_as_neg, cm.neg_as_neg + cm.pos_as_neg);
        let precision_pos = ratio(cm.pos_as_pos, cm.pos_as_pos + cm.neg_as_pos);
        let recall_neg = ratio(cm.neg_as_neg, support_neg);
        let recall_pos = ratio(cm.pos_as_pos, support_pos);
        let f1_neg = f1(precision_neg, recall_neg);
        let f1_pos = f1(precision_pos, recall_pos);
        let accuracy = ratio(cm.neg_as_neg + cm.pos_as_pos, total);

        let weight = |neg: f64, pos: f64| {
            if total == 0 {
                0.0
            } else {
                (neg * support_neg as f64 + pos * support_pos as f64) / total as f64
            }
        };

        EvalReport {
            negative: ClassMetrics {
                precision: precision_neg,
                recall: recall_neg,
                f1: f1_neg,
                support: support_neg,
            },
            positive: ClassMetrics {
                precision: precision_pos,
                recall: recall_pos,
                f1: f1_pos,
                support: support_pos,
            },
            accuracy,
            macro_avg: AverageMetrics {
                precision: (precision_neg + precision_pos) / 2.0,
                recall: (recall_neg + recall_pos) / 2.0,
                f1: (f1_neg + f1_pos) / 2.0,
            },
            weighted_avg: AverageMetrics {
                precision: weight(precision_neg, precision_pos),
                recall: accuracy,
                f1: weight(f1_neg, f1_pos),
            },
            total_support: total,
        }
    }

    /// Aligned text report, two-decimal cells:
    ///
    /// ```text
    ///               precision    recall  f1-score   support
    ///
    ///     negative       0.89      0.76      0.82      4539
    ///     ...
    /// ```
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:>12}  {:>9} {:>9} {:>9} {:>9}\n\n",
            "", "precision", "recall", "f1-score", "support"
        ));
        for (name, m) in [("negative", &self.negative), ("positive", &self.positive)] {
            out.push_str(&format!(
                "{:>12}  {:>9.2} {:>9.2} {:>9.2} {:>9}\n",
                name, m.precision, m.recall, m.f1, m.support
            ));
        }
        out.push('\n');
        out.push_str(&format!(
            "{:>12}  {:>9} {:>9} {:>9.2} {:>9}\n",
            "accuracy", "", "", self.accuracy, self.total_support
        ));
        for (name, m) in [("macro avg", &self.macro_avg), ("weighted avg", &self.weighted_avg)] {
            out.push_str(&format!(
                "{:>12}  {:>9.2} {:>9.2} {:>9.2} {:>9}\n",
                name, m.precision, m.recall, m.f1, self.total_support
            ));
        }
        out
    }
}

/// Score a prediction set against gold-labeled documents. Every gold tweet
/// id must be predicted; predictions for unknown ids are ignored.
pub fn evaluate(predictions: &PredictionSet, gold: &[Document]) -> Result<EvalReport, ClassifyError> {
    let by_id: HashMap<u64, SentimentLabel> =
        predictions.items().iter().map(|p| (p.tweet_id, p.label)).collect();
    let mut missing = Vec::new();
    let mut pairs = Vec::with_capacity(gold.len());
    for doc in gold {
        match by_id.get(&doc.tweet_id) {
            Some(&pred) => pairs.push((doc.label, pred)),
            None => missing.push(doc.tweet_id),
        }
    }
    if !missing.is_empty() {
        return Err(ClassifyError::MissingPredictions(missing));
    }
    Ok(EvalReport::from_confusion(&ConfusionMatrix::from_pairs(pairs)))
}
