//! Sentiment classifiers and evaluation: stratified splitting, multinomial
//! Naive Bayes, a Pegasos-style linear SVM, external prediction import, and
//! precision/recall/F1 reporting.

mod bayes;
mod metrics;
mod svm;

pub use bayes::{train_naive_bayes, NaiveBayesModel};
pub use metrics::{evaluate, AverageMetrics, ClassMetrics, ConfusionMatrix, EvalReport};
pub use svm::{train_linear_svm, LinearSvm, SvmConfig};

use std::collections::HashSet;
use std::io::Read;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::SentimentLabel;
use crate::preprocess::Document;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("no {0} documents present")]
    MissingClass(SentimentLabel),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("smoothing alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("regularization lambda must be positive, got {0}")]
    InvalidLambda(f64),
    #[error("epochs must be at least 1")]
    InvalidEpochs,
    #[error("failed to read predictions: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed prediction row {line}: {reason}")]
    MalformedPredictionRow { line: u64, reason: String },
    #[error("unknown label code {code:?} on prediction row {line}")]
    UnknownLabelCode { line: u64, code: String },
    #[error("duplicate prediction for tweet id {0}")]
    DuplicatePredictionId(u64),
    #[error("confidence {value} on row {line} is outside [0, 1]")]
    InvalidConfidence { line: u64, value: f64 },
    #[error("missing predictions for {} gold tweet ids: {}", .0.len(), format_ids(.0))]
    MissingPredictions(Vec<u64>),
}

fn format_ids(ids: &[u64]) -> String {
    const SHOWN: usize = 10;
    let mut s = ids
        .iter()
        .take(SHOWN)
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOWN {
        s.push_str(", ...");
    }
    s
}

/// One externally produced prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub tweet_id: u64,
    pub label: SentimentLabel,
    pub confidence: Option<f64>,
}

/// Predictions keyed by unique tweet id. Carries the outputs of models
/// trained elsewhere so they can be scored by the same metrics engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionSet {
    items: Vec<Prediction>,
}

impl PredictionSet {
    pub fn new(items: Vec<Prediction>) -> Result<Self, ClassifyError> {
        let mut seen = HashSet::with_capacity(items.len());
        for p in &items {
            if !seen.insert(p.tweet_id) {
                return Err(ClassifyError::DuplicatePredictionId(p.tweet_id));
            }
        }
        Ok(PredictionSet { items })
    }

    pub fn items(&self) -> &[Prediction] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

/// Parse a prediction CSV: `tweet_id,label_code[,confidence]` per row,
/// label codes `0` (negative) and `4` (positive), no header.
pub fn import_predictions<R: Read>(source: R) -> Result<PredictionSet, ClassifyError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let mut items = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut line = 0u64;
    loop {
        match reader.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(err) => {
                return Err(ClassifyError::MalformedPredictionRow {
                    line: line + 1,
                    reason: err.to_string(),
                })
            }
        }
        line += 1;
        if record.len() < 2 || record.len() > 3 {
            return Err(ClassifyError::MalformedPredictionRow {
                line,
                reason: format!("expected 2 or 3 fields, got {}", record.len()),
            });
        }
        let tweet_id = record[0]
            .parse::<u64>()
            .map_err(|e| ClassifyError::MalformedPredictionRow {
                line,
                reason: format!("bad tweet id {:?}: {e}", &record[0]),
            })?;
        let label = SentimentLabel::from_code(&record[1]).ok_or_else(|| ClassifyError::UnknownLabelCode {
            line,
            code: record[1].to_string(),
        })?;
        let confidence = match record.get(2) {
            None | Some("") => None,
            Some(raw) => {
                let value = raw.parse::<f64>().map_err(|e| ClassifyError::MalformedPredictionRow {
                    line,
                    reason: format!("bad confidence {raw:?}: {e}"),
                })?;
                if !(0.0..=1.0).contains(&value) {
                    return Err(ClassifyError::InvalidConfidence { line, value });
                }
                Some(value)
            }
        };
        items.push(Prediction {
            tweet_id,
            label,
            confidence,
        });
    }
    PredictionSet::new(items)
}

/// Deterministic stratified train/test split. Per-class test sizes are
/// `round(n_class * test_fraction)`, so class proportions are preserved to
/// within one document. Relative input order is kept on both sides.
pub fn split_stratified(
    docs: Vec<Document>,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<Document>, Vec<Document>), ClassifyError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(ClassifyError::InvalidFraction(test_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_test = vec![false; docs.len()];
    for label in [SentimentLabel::Negative, SentimentLabel::Positive] {
        let mut indices: Vec<usize> = docs
            .iter()
            .enumerate()
            .filter(|(_, d)| d.label == label)
            .map(|(i, _)| i)
            .collect();
        if indices.is_empty() {
            return Err(ClassifyError::MissingClass(label));
        }
        let take = ((indices.len() as f64 * test_fraction).round() as usize).min(indices.len());
        indices.shuffle(&mut rng);
        for &i in indices.iter().take(take) {
            in_test[i] = true;
        }
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (i, doc) in docs.into_iter().enumerate() {
        if in_test[i] {
            test.push(doc);
        } else {
            train.push(doc);
        }
    }
    Ok((train, test))
}
