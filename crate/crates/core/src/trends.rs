//! Sentiment counts bucketed over time and text-size axes.
//!
//! For any axis, the bucket counts plus the residual (documents with no
//! value on that axis, e.g. a missing timestamp) always sum to the number
//! of input documents.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Month, SentimentLabel, Weekday};
use crate::preprocess::{Document, SizeCategory};

#[derive(Debug, Error)]
pub enum TrendError {
    #[error("cannot summarize an empty document set")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BucketAxis {
    Hour,
    Weekday,
    Month,
    LengthCategory,
    WordCountCategory,
}

impl BucketAxis {
    pub const ALL: &'static [BucketAxis] = &[
        BucketAxis::Hour,
        BucketAxis::Weekday,
        BucketAxis::Month,
        BucketAxis::LengthCategory,
        BucketAxis::WordCountCategory,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BucketAxis::Hour => "hour",
            BucketAxis::Weekday => "weekday",
            BucketAxis::Month => "month",
            BucketAxis::LengthCategory => "length",
            BucketAxis::WordCountCategory => "wordcount",
        }
    }

    pub fn bucket_count(self) -> usize {
        match self {
            BucketAxis::Hour => 24,
            BucketAxis::Weekday => 7,
            BucketAxis::Month => 12,
            BucketAxis::LengthCategory | BucketAxis::WordCountCategory => SizeCategory::ALL.len(),
        }
    }

    pub fn bucket_label(self, index: usize) -> String {
        match self {
            BucketAxis::Hour => index.to_string(),
            BucketAxis::Weekday => Weekday::ALL[index].abbrev().to_string(),
            BucketAxis::Month => Month::ALL[index].abbrev().to_string(),
            BucketAxis::LengthCategory | BucketAxis::WordCountCategory => {
                SizeCategory::ALL[index].label().to_string()
            }
        }
    }

    /// Bucket index of a document on this axis; `None` when undefined
    /// (temporal axes on a document without a timestamp).
    pub fn bucket_of(self, doc: &Document) -> Option<usize> {
        match self {
            BucketAxis::Hour => doc.timestamp.as_ref().map(|t| t.hour as usize),
            BucketAxis::Weekday => doc.timestamp.as_ref().map(|t| t.weekday.index()),
            BucketAxis::Month => doc.timestamp.as_ref().map(|t| t.month.index()),
            BucketAxis::LengthCategory => Some(doc.length_category.index()),
            BucketAxis::WordCountCategory => Some(doc.word_count_category.index()),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketCount {
    pub negative: u64,
    pub positive: u64,
}

impl BucketCount {
    pub fn total(&self) -> u64 {
        self.negative + self.positive
    }
}

/// Per-bucket sentiment counts for one axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrendTable {
    pub axis: BucketAxis,
    pub buckets: Vec<BucketCount>,
    /// Documents with no value on this axis.
    pub residual: u64,
}

impl TrendTable {
    pub fn counted(&self) -> u64 {
        self.buckets.iter().map(BucketCount::total).sum()
    }

    fn peak(&self, pick: impl Fn(&BucketCount) -> u64) -> Peak {
        let mut best = 0usize;
        for (i, bucket) in self.buckets.iter().enumerate() {
            if pick(bucket) > pick(&self.buckets[best]) {
                best = i;
            }
        }
        Peak {
            index: best,
            bucket: self.axis.bucket_label(best),
            count: pick(&self.buckets[best]),
        }
    }

    fn ranked(&self, pick: impl Fn(&BucketCount) -> u64) -> Vec<RankedBucket> {
        let mut rows: Vec<RankedBucket> = self
            .buckets
            .iter()
            .enumerate()
            .map(|(i, b)| RankedBucket {
                bucket: self.axis.bucket_label(i),
                count: pick(b),
            })
            .collect();
        // stable sort keeps earliest-bucket order on ties
        rows.sort_by_key(|r| std::cmp::Reverse(r.count));
        rows
    }

    /// `bucket,negative,positive` rows in natural bucket order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "bucket,negative,positive")?;
        for (i, bucket) in self.buckets.iter().enumerate() {
            writeln!(out, "{},{},{}", self.axis.bucket_label(i), bucket.negative, bucket.positive)?;
        }
        Ok(())
    }
}

/// Count each document into exactly one bucket of the axis.
pub fn aggregate(docs: &[Document], axis: BucketAxis) -> TrendTable {
    let mut buckets = vec![BucketCount::default(); axis.bucket_count()];
    let mut residual = 0;
    for doc in docs {
        match axis.bucket_of(doc) {
            Some(i) => match doc.label {
                SentimentLabel::Negative => buckets[i].negative += 1,
                SentimentLabel::Positive => buckets[i].positive += 1,
            },
            None => residual += 1,
        }
    }
    TrendTable { axis, buckets, residual }
}

/// Argmax bucket of a table under one sentiment; ties resolve to the
/// earliest bucket.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Peak {
    pub index: usize,
    pub bucket: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedBucket {
    pub bucket: String,
    pub count: u64,
}

/// Peaks and the full count-ranked bucket lists for one axis, so
/// multi-modal structure stays visible next to the argmax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxisPeaks {
    pub axis: BucketAxis,
    pub peak_negative: Peak,
    pub peak_positive: Peak,
    pub ranked_negative: Vec<RankedBucket>,
    pub ranked_positive: Vec<RankedBucket>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSummary {
    pub total_docs: u64,
    pub negative_count: u64,
    pub positive_count: u64,
    pub negative_share: f64,
    pub positive_share: f64,
    pub peaks: Vec<AxisPeaks>,
}

/// Overall sentiment shares plus per-table peaks. Shares derive from the
/// raw counts and sum to 1 exactly.
pub fn summarize(docs: &[Document], tables: &[TrendTable]) -> Result<TrendSummary, TrendError> {
    if docs.is_empty() {
        return Err(TrendError::EmptyInput);
    }
    let negative_count = docs.iter().filter(|d| d.label == SentimentLabel::Negative).count() as u64;
    let positive_count = docs.len() as u64 - negative_count;
    let negative_share = negative_count as f64 / docs.len() as f64;
    let peaks = tables
        .iter()
        .map(|t| AxisPeaks {
            axis: t.axis,
            peak_negative: t.peak(|b| b.negative),
            peak_positive: t.peak(|b| b.positive),
            ranked_negative: t.ranked(|b| b.negative),
            ranked_positive: t.ranked(|b| b.positive),
        })
        .collect();
    Ok(TrendSummary {
        total_docs: docs.len() as u64,
        negative_count,
        positive_count,
        negative_share,
        positive_share: 1.0 - negative_share,
        peaks,
    })
}
