//! Helpers shared by the integration suites.
#![allow(dead_code)] // each suite uses a different subset

use std::fmt::Write as _;

use sentrend::corpus::{parse_timestamp, SentimentLabel, TimestampParts};
use sentrend::preprocess::{categorize, CategoryThresholds, Document};

/// Deterministic synthetic corpus in Sentiment140 shape with a planted
/// "car" subset (roughly 60% negative).
pub fn synthetic_csv(rows: usize) -> String {
    let weekdays = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];
    let months = ["Apr", "May", "Jun"];
    let negative_texts = [
        "my car broke down on the highway again",
        "insurance for this car is a scary nightmare",
        "the car wash ruined my paint, so upset",
        "stuck in traffic, car engine is overheating",
        "scratched my car door at the dealership",
    ];
    let positive_texts = [
        "I love my new car so much",
        "great drive today, the car handled perfectly",
        "washed the car, it looks amazing now",
        "car stereo upgrade was totally worth it",
        "road trip in the car with the best crew",
    ];
    let fillers = [
        "had pancakes for breakfast today",
        "watching a movie with the family tonight",
        "this homework is taking forever",
        "sunny weather makes everything better",
    ];
    let mut out = String::new();
    for i in 0..rows {
        let negative = i % 5 < 3;
        let (label, body) = if i % 3 == 0 {
            (if negative { "0" } else { "4" }, fillers[i % fillers.len()])
        } else if negative {
            ("0", negative_texts[i % negative_texts.len()])
        } else {
            ("4", positive_texts[i % positive_texts.len()])
        };
        let weekday = weekdays[i % 7];
        let month = months[i % 3];
        let day = 1 + (i % 27);
        let hour = i % 24;
        writeln!(
            out,
            "\"{label}\",\"{i}\",\"{weekday} {month} {day:02} {hour:02}:{m:02}:00 PDT 2009\",\"NO_QUERY\",\"user{u}\",\"{body} #{i}\"",
            m = i % 60,
            u = i % 13,
        )
        .unwrap();
    }
    out
}

/// Document with explicit tokens and label; sizes follow the default
/// thresholds so category invariants hold.
pub fn make_document(
    id: u64,
    label: SentimentLabel,
    tokens: &[&str],
    timestamp: Option<TimestampParts>,
    raw_char_len: usize,
    raw_word_count: usize,
) -> Document {
    let thresholds = CategoryThresholds::default();
    let (length_category, word_count_category) = categorize(raw_char_len, raw_word_count, &thresholds);
    Document {
        tweet_id: id,
        label,
        tokens: tokens.iter().map(|t| t.to_string()).collect(),
        raw_char_len,
        raw_word_count,
        length_category,
        word_count_category,
        timestamp,
    }
}

pub fn doc_with_tokens(id: u64, label: SentimentLabel, tokens: &[&str]) -> Document {
    make_document(id, label, tokens, None, 30, 5)
}

pub fn timestamp_at(weekday: &str, hour: u8) -> Option<TimestampParts> {
    parse_timestamp(&format!("{weekday} Apr 06 {hour:02}:15:00 PDT 2009"))
}
