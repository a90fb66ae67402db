//! Tweet text cleaning, tokenization, and size categorization.
//!
//! Cleaning applies, in order: URL removal (`http://`, `https://`, `www.`
//! prefixes up to the next whitespace), whole-@mention removal, `#` stripping
//! (tag text kept by default), removal of everything that is not an ASCII
//! letter or whitespace, lowercasing, and whitespace collapsing. The result
//! always matches `[a-z ]*` with single interior spaces and no outer spaces,
//! which makes the operation idempotent.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{TimestampParts, TweetRecord};
use crate::SentimentLabel;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("failed to read stopword file: {0}")]
    Io(#[from] std::io::Error),
    #[error("stopword list is empty")]
    EmptyStopwordList,
    #[error("size thresholds must be strictly increasing, got {0:?}")]
    MisorderedThresholds([usize; 3]),
}

static URL_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S*").unwrap());
static MENTION_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"@\w+").unwrap());
static HASHTAG_RE: Lazy<Regex> = Lazy::new(|| Regex::new(r"#\w+").unwrap());

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeOptions {
    /// Drop the whole `#tag` instead of keeping the tag text.
    pub drop_hashtag_text: bool,
}

/// Clean raw tweet text down to lowercase ASCII words.
pub fn normalize_text(raw: &str) -> String {
    normalize_text_with(raw, &NormalizeOptions::default())
}

pub fn normalize_text_with(raw: &str, opts: &NormalizeOptions) -> String {
    let text = URL_RE.replace_all(raw, " ");
    let text = MENTION_RE.replace_all(&text, " ");
    let text = if opts.drop_hashtag_text {
        HASHTAG_RE.replace_all(&text, " ")
    } else {
        text
    };
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for ch in text.chars() {
        if ch.is_ascii_alphabetic() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(ch.to_ascii_lowercase());
        } else if ch.is_whitespace() {
            pending_space = true;
        }
        // every other character ('#', digits, punctuation, non-ASCII) drops
    }
    out
}

/// Lowercase stopword set. The default list ships with the crate so results
/// are reproducible without network access.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordList {
    words: HashSet<String>,
}

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

impl Default for StopwordList {
    fn default() -> Self {
        StopwordList::from_reader(DEFAULT_STOPWORDS.as_bytes()).expect("embedded stopword list is valid")
    }
}

impl StopwordList {
    /// Empty set; useful for keep-stopword tokenization modes.
    pub fn none() -> Self {
        StopwordList { words: HashSet::new() }
    }

    /// Load one word per line; blank lines and `#` comments are ignored and
    /// entries are lowercased.
    pub fn from_reader<R: Read>(source: R) -> Result<Self, PreprocessError> {
        let mut words = HashSet::new();
        for line in BufReader::new(source).lines() {
            let line = line?;
            let word = line.trim();
            if word.is_empty() || word.starts_with('#') {
                continue;
            }
            words.insert(word.to_lowercase());
        }
        if words.is_empty() {
            return Err(PreprocessError::EmptyStopwordList);
        }
        Ok(StopwordList { words })
    }

    pub fn from_path(path: &Path) -> Result<Self, PreprocessError> {
        StopwordList::from_reader(std::fs::File::open(path)?)
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopwordList {
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Split cleaned text on whitespace, dropping single-character tokens and
/// stopwords. Order and duplicates are preserved.
pub fn tokenize_and_filter(cleaned: &str, stopwords: &StopwordList) -> Vec<String> {
    cleaned
        .split_whitespace()
        .filter(|t| t.chars().count() >= 2 && !stopwords.contains(t))
        .map(str::to_string)
        .collect()
}

/// Size buckets used for both character length and word count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SizeCategory {
    VeryShort,
    Short,
    Medium,
    Long,
}

impl SizeCategory {
    pub const ALL: &'static [SizeCategory] = &[
        SizeCategory::VeryShort,
        SizeCategory::Short,
        SizeCategory::Medium,
        SizeCategory::Long,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SizeCategory::VeryShort => "very_short",
            SizeCategory::Short => "short",
            SizeCategory::Medium => "medium",
            SizeCategory::Long => "long",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Upper bounds of the first three buckets; anything beyond the last bound
/// is `Long`. Defaults partition the 140-character tweet range evenly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryThresholds {
    char_bounds: [usize; 3],
    word_bounds: [usize; 3],
}

impl Default for CategoryThresholds {
    fn default() -> Self {
        CategoryThresholds {
            char_bounds: [40, 80, 120],
            word_bounds: [5, 12, 20],
        }
    }
}

impl CategoryThresholds {
    pub fn new(char_bounds: [usize; 3], word_bounds: [usize; 3]) -> Result<Self, PreprocessError> {
        for bounds in [char_bounds, word_bounds] {
            if !(bounds[0] < bounds[1] && bounds[1] < bounds[2]) {
                return Err(PreprocessError::MisorderedThresholds(bounds));
            }
        }
        Ok(CategoryThresholds { char_bounds, word_bounds })
    }

    pub fn char_bounds(&self) -> [usize; 3] {
        self.char_bounds
    }

    pub fn word_bounds(&self) -> [usize; 3] {
        self.word_bounds
    }
}

fn bucket(value: usize, bounds: [usize; 3]) -> SizeCategory {
    if value <= bounds[0] {
        SizeCategory::VeryShort
    } else if value <= bounds[1] {
        SizeCategory::Short
    } else if value <= bounds[2] {
        SizeCategory::Medium
    } else {
        SizeCategory::Long
    }
}

/// Categorize by raw character length and raw word count.
pub fn categorize(
    raw_char_len: usize,
    raw_word_count: usize,
    thresholds: &CategoryThresholds,
) -> (SizeCategory, SizeCategory) {
    (
        bucket(raw_char_len, thresholds.char_bounds),
        bucket(raw_word_count, thresholds.word_bounds),
    )
}

/// A preprocessed tweet ready for modeling. Tokens are lowercase alphabetic
/// words with stopwords removed; size categories come from the raw text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub tweet_id: u64,
    pub label: SentimentLabel,
    pub tokens: Vec<String>,
    pub raw_char_len: usize,
    pub raw_word_count: usize,
    pub length_category: SizeCategory,
    pub word_count_category: SizeCategory,
    pub timestamp: Option<TimestampParts>,
}

impl Document {
    pub fn has_tokens(&self) -> bool {
        !self.tokens.is_empty()
    }
}

/// Run the full per-record cleaning pipeline.
pub fn build_document(
    record: &TweetRecord,
    stopwords: &StopwordList,
    thresholds: &CategoryThresholds,
    opts: &NormalizeOptions,
) -> Document {
    let cleaned = normalize_text_with(&record.raw_text, opts);
    let tokens = tokenize_and_filter(&cleaned, stopwords);
    let raw_char_len = record.raw_text.chars().count();
    let raw_word_count = record.raw_text.split_whitespace().count();
    let (length_category, word_count_category) = categorize(raw_char_len, raw_word_count, thresholds);
    Document {
        tweet_id: record.tweet_id,
        label: record.label,
        tokens,
        raw_char_len,
        raw_word_count,
        length_category,
        word_count_category,
        timestamp: record.timestamp.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_strips_noise_in_order() {
        assert_eq!(
            normalize_text("@jim I LOVE this http://t.co/x #car2020 :) 99"),
            "i love this car"
        );
    }

    #[test]
    fn normalize_handles_empty_and_plain_text() {
        assert_eq!(normalize_text(""), "");
        assert_eq!(normalize_text("Plain words only"), "plain words only");
    }

    #[test]
    fn normalize_url_variants() {
        assert_eq!(normalize_text("see https://x.co/a?b=1 now"), "see now");
        assert_eq!(normalize_text("WWW.EXAMPLE.COM rocks"), "rocks");
        assert_eq!(normalize_text("glued:http://t.co end"), "glued end");
    }

    #[test]
    fn hashtag_text_kept_by_default_dropped_on_request() {
        assert_eq!(normalize_text("#car is fun"), "car is fun");
        let opts = NormalizeOptions { drop_hashtag_text: true };
        assert_eq!(normalize_text_with("#car is fun", &opts), "is fun");
    }

    #[test]
    fn mentions_removed_entirely() {
        assert_eq!(normalize_text("@a_user99 hello @Other"), "hello");
    }

    #[test]
    fn tokenize_drops_stopwords_and_short_tokens() {
        let stopwords = StopwordList::from_words(["i", "this"]);
        assert_eq!(tokenize_and_filter("i love this car", &stopwords), vec!["love", "car"]);
        assert_eq!(tokenize_and_filter("a b", &stopwords), Vec::<String>::new());
        let none = StopwordList::none();
        assert_eq!(
            tokenize_and_filter("car car wash", &none),
            vec!["car", "car", "wash"]
        );
    }

    #[test]
    fn default_stopword_list_is_populated() {
        let list = StopwordList::default();
        assert!(list.len() > 150, "expected a substantial list, got {}", list.len());
        for w in ["the", "and", "this", "dont"] {
            assert!(list.contains(w), "missing {w}");
        }
        assert!(!list.contains("car"));
    }

    #[test]
    fn stopword_loading_rejects_empty_and_lowercases() {
        assert!(matches!(
            StopwordList::from_reader("".as_bytes()),
            Err(PreprocessError::EmptyStopwordList)
        ));
        let list = StopwordList::from_reader("The\n\n# comment\nAND\n".as_bytes()).unwrap();
        assert!(list.contains("the") && list.contains("and"));
        assert_eq!(list.len(), 2);
    }

    #[test]
    fn categorize_defaults() {
        let t = CategoryThresholds::default();
        assert_eq!(categorize(30, 4, &t), (SizeCategory::VeryShort, SizeCategory::VeryShort));
        assert_eq!(categorize(100, 15, &t), (SizeCategory::Medium, SizeCategory::Medium));
        assert_eq!(categorize(140, 25, &t), (SizeCategory::Long, SizeCategory::Long));
        // closed boundaries
        assert_eq!(categorize(40, 5, &t), (SizeCategory::VeryShort, SizeCategory::VeryShort));
        assert_eq!(categorize(41, 6, &t), (SizeCategory::Short, SizeCategory::Short));
        assert_eq!(categorize(120, 20, &t), (SizeCategory::Medium, SizeCategory::Medium));
        assert_eq!(categorize(121, 21, &t), (SizeCategory::Long, SizeCategory::Long));
    }

    #[test]
    fn misordered_thresholds_rejected() {
        assert!(matches!(
            CategoryThresholds::new([80, 40, 120], [5, 12, 20]),
            Err(PreprocessError::MisorderedThresholds(_))
        ));
        assert!(CategoryThresholds::new([10, 20, 30], [1, 2, 3]).is_ok());
    }

    #[test]
    fn build_document_wires_everything_together() {
        let record = crate::corpus::TweetRecord {
            label: SentimentLabel::Positive,
            tweet_id: 5,
            raw_date: "Mon Apr 06 22:19:45 PDT 2009".into(),
            timestamp: crate::corpus::parse_timestamp("Mon Apr 06 22:19:45 PDT 2009"),
            query_flag: "NO_QUERY".into(),
            user: "u".into(),
            raw_text: "@jim I LOVE this car".into(),
        };
        let doc = build_document(
            &record,
            &StopwordList::default(),
            &CategoryThresholds::default(),
            &NormalizeOptions::default(),
        );
        assert_eq!(doc.tokens, vec!["love", "car"]);
        assert_eq!(doc.raw_char_len, 20);
        assert_eq!(doc.raw_word_count, 5);
        assert_eq!(doc.length_category, SizeCategory::VeryShort);
        assert!(doc.timestamp.is_some());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_and_ascii_lower(raw in "\\PC{0,120}") {
            let once = normalize_text(&raw);
            prop_assert_eq!(normalize_text(&once), once.clone());
            prop_assert!(once.chars().all(|c| c.is_ascii_lowercase() || c == ' '));
            prop_assert!(!once.starts_with(' ') && !once.ends_with(' '));
            prop_assert!(!once.contains("  "));
        }

        #[test]
        fn tokens_respect_length_and_stopword_rules(raw in "\\PC{0,120}") {
            let stopwords = StopwordList::default();
            let tokens = tokenize_and_filter(&normalize_text(&raw), &stopwords);
            for t in &tokens {
                prop_assert!(t.len() >= 2);
                prop_assert!(!stopwords.contains(t));
                prop_assert!(t.chars().all(|c| c.is_ascii_lowercase()));
            }
        }

        #[test]
        fn every_size_maps_to_exactly_one_category(chars in 0usize..10_000, words in 0usize..2_000) {
            let t = CategoryThresholds::default();
            let (lc, wc) = categorize(chars, words, &t);
            prop_assert!(SizeCategory::ALL.contains(&lc));
            prop_assert!(SizeCategory::ALL.contains(&wc));
        }
    }
}
