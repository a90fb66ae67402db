//! Sentiment140 corpus ingestion: CSV parsing, timestamps, keyword filtering.
//!
//! The input format is the public six-column Sentiment140 CSV (no header):
//! `target, id, date, flag, user, text`. Fields may be double-quoted and the
//! file is Latin-1 encoded; fields that fail UTF-8 decoding fall back to a
//! Latin-1 interpretation so no row is ever dropped for encoding alone.

use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed csv input: {0}")]
    Csv(#[from] csv::Error),
    #[error("keyword must not be empty")]
    EmptyKeyword,
}

/// Binary sentiment polarity. Source label codes: `0` negative, `4` positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    Negative,
    Positive,
}

impl SentimentLabel {
    /// Parse a Sentiment140 target code. Anything but `0` or `4` (including
    /// the documented-but-unused neutral code `2`) is rejected.
    pub fn from_code(code: &str) -> Option<Self> {
        match code.trim() {
            "0" => Some(SentimentLabel::Negative),
            "4" => Some(SentimentLabel::Positive),
            _ => None,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            SentimentLabel::Negative => "0",
            SentimentLabel::Positive => "4",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SentimentLabel::Negative => "negative",
            SentimentLabel::Positive => "positive",
        }
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

macro_rules! abbrev_enum {
    ($name:ident { $($variant:ident => $abbr:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
        pub enum $name {
            $($variant,)+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant,)+];

            pub fn from_abbrev(s: &str) -> Option<Self> {
                match s {
                    $($abbr => Some($name::$variant),)+
                    _ => None,
                }
            }

            pub fn abbrev(self) -> &'static str {
                match self {
                    $($name::$variant => $abbr,)+
                }
            }

            /// Position within the natural ordering (0-based).
            pub fn index(self) -> usize {
                self as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.abbrev())
            }
        }
    };
}

abbrev_enum!(Weekday {
    Mon => "Mon",
    Tue => "Tue",
    Wed => "Wed",
    Thu => "Thu",
    Fri => "Fri",
    Sat => "Sat",
    Sun => "Sun",
});

abbrev_enum!(Month {
    Jan => "Jan",
    Feb => "Feb",
    Mar => "Mar",
    Apr => "Apr",
    May => "May",
    Jun => "Jun",
    Jul => "Jul",
    Aug => "Aug",
    Sep => "Sep",
    Oct => "Oct",
    Nov => "Nov",
    Dec => "Dec",
});

/// Fields extracted positionally from the dataset's fixed date layout
/// `Www Mmm DD HH:MM:SS TZ YYYY`. No timezone conversion is applied.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimestampParts {
    pub weekday: Weekday,
    pub month: Month,
    pub day: u8,
    pub hour: u8,
    pub minute: u8,
    pub second: u8,
    pub tz: String,
    pub year: i32,
}

impl fmt::Display for TimestampParts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {:02} {:02}:{:02}:{:02} {} {}",
            self.weekday, self.month, self.day, self.hour, self.minute, self.second, self.tz, self.year
        )
    }
}

/// Parse the fixed layout `Www Mmm DD HH:MM:SS TZ YYYY`.
/// Any deviation yields `None`, never an error.
pub fn parse_timestamp(raw: &str) -> Option<TimestampParts> {
    let parts: Vec<&str> = raw.split_whitespace().collect();
    if parts.len() != 6 {
        return None;
    }
    let weekday = Weekday::from_abbrev(parts[0])?;
    let month = Month::from_abbrev(parts[1])?;
    let day: u8 = parts[2].parse().ok()?;
    if !(1..=31).contains(&day) {
        return None;
    }
    let clock: Vec<&str> = parts[3].split(':').collect();
    if clock.len() != 3 {
        return None;
    }
    let hour: u8 = clock[0].parse().ok()?;
    let minute: u8 = clock[1].parse().ok()?;
    let second: u8 = clock[2].parse().ok()?;
    if hour > 23 || minute > 59 || second > 59 {
        return None;
    }
    let tz = parts[4].to_string();
    let year: i32 = parts[5].parse().ok()?;
    Some(TimestampParts {
        weekday,
        month,
        day,
        hour,
        minute,
        second,
        tz,
        year,
    })
}

/// One parsed Sentiment140 row.
///
/// `raw_date` and `query_flag` are kept verbatim so a well-formed row can be
/// re-serialized without losing field content; `raw_text` preserves original
/// casing and punctuation because entity extraction runs on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub label: SentimentLabel,
    pub tweet_id: u64,
    pub raw_date: String,
    /// Parsed view of `raw_date`; `None` when the date deviates from the
    /// fixed layout. Such records are excluded from temporal aggregation.
    pub timestamp: Option<TimestampParts>,
    pub query_flag: String,
    pub user: String,
    pub raw_text: String,
}

impl TweetRecord {
    /// The six CSV columns in file order.
    pub fn csv_fields(&self) -> [String; 6] {
        [
            self.label.code().to_string(),
            self.tweet_id.to_string(),
            self.raw_date.clone(),
            self.query_flag.clone(),
            self.user.clone(),
            self.raw_text.clone(),
        ]
    }
}

/// Row accounting for one parse pass. `rows_read` always equals
/// `records_emitted` plus the sum of the skip counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseStats {
    pub rows_read: u64,
    pub records_emitted: u64,
    pub skipped_field_count: u64,
    pub skipped_bad_label: u64,
    pub skipped_bad_id: u64,
    pub skipped_empty_text: u64,
    /// Rows kept with an unparseable date (not skips).
    pub missing_timestamps: u64,
}

impl ParseStats {
    pub fn skipped(&self) -> u64 {
        self.skipped_field_count + self.skipped_bad_label + self.skipped_bad_id + self.skipped_empty_text
    }
}

/// Decode a CSV field: UTF-8 when valid, Latin-1 otherwise.
fn decode_field(bytes: &[u8]) -> String {
    match std::str::from_utf8(bytes) {
        Ok(s) => s.to_owned(),
        Err(_) => bytes.iter().map(|&b| b as char).collect(),
    }
}

fn record_from_row(row: &csv::ByteRecord, stats: &mut ParseStats) -> Option<TweetRecord> {
    stats.rows_read += 1;
    if row.len() != 6 {
        stats.skipped_field_count += 1;
        return None;
    }
    let label = match SentimentLabel::from_code(&decode_field(&row[0])) {
        Some(label) => label,
        None => {
            stats.skipped_bad_label += 1;
            return None;
        }
    };
    let tweet_id = match decode_field(&row[1]).trim().parse::<u64>() {
        Ok(id) => id,
        Err(_) => {
            stats.skipped_bad_id += 1;
            return None;
        }
    };
    let raw_text = decode_field(&row[5]);
    if raw_text.is_empty() {
        stats.skipped_empty_text += 1;
        return None;
    }
    let raw_date = decode_field(&row[2]);
    let timestamp = parse_timestamp(&raw_date);
    if timestamp.is_none() {
        stats.missing_timestamps += 1;
    }
    stats.records_emitted += 1;
    Some(TweetRecord {
        label,
        tweet_id,
        raw_date,
        timestamp,
        query_flag: decode_field(&row[3]),
        user: decode_field(&row[4]),
        raw_text,
    })
}

/// Streaming reader over a Sentiment140 byte stream.
///
/// Malformed rows are skipped and counted in [`ParseStats`]; only I/O and
/// CSV-framing failures surface as errors.
pub struct RecordReader<R: Read> {
    reader: csv::Reader<R>,
    row: csv::ByteRecord,
    stats: ParseStats,
    failed: bool,
}

impl<R: Read> RecordReader<R> {
    pub fn new(source: R) -> Self {
        let reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(source);
        RecordReader {
            reader,
            row: csv::ByteRecord::new(),
            stats: ParseStats::default(),
            failed: false,
        }
    }

    pub fn stats(&self) -> &ParseStats {
        &self.stats
    }

    pub fn into_stats(self) -> ParseStats {
        self.stats
    }
}

impl<R: Read> Iterator for RecordReader<R> {
    type Item = Result<TweetRecord, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            match self.reader.read_byte_record(&mut self.row) {
                Ok(true) => {
                    if let Some(record) = record_from_row(&self.row, &mut self.stats) {
                        return Some(Ok(record));
                    }
                }
                Ok(false) => return None,
                Err(err) => {
                    self.failed = true;
                    return Some(Err(err.into()));
                }
            }
        }
    }
}

/// Parse an entire Sentiment140 stream into memory.
pub fn parse_sentiment140<R: Read>(source: R) -> Result<(Vec<TweetRecord>, ParseStats), CorpusError> {
    let mut reader = RecordReader::new(source);
    let mut records = Vec::new();
    for record in reader.by_ref() {
        records.push(record?);
    }
    Ok((records, reader.into_stats()))
}

/// Re-serialize records in the six-column input format (all fields quoted).
pub fn write_records<'a, W, I>(records: I, out: W) -> Result<(), CorpusError>
where
    W: Write,
    I: IntoIterator<Item = &'a TweetRecord>,
{
    let mut writer = csv::WriterBuilder::new()
        .quote_style(csv::QuoteStyle::Always)
        .from_writer(out);
    for record in records {
        writer.write_record(record.csv_fields().iter())?;
    }
    writer.flush()?;
    Ok(())
}

/// Keyword matching semantics for subset selection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Any occurrence of the keyword inside the lowercased text.
    #[default]
    Substring,
    /// Occurrences delimited by non-alphanumeric characters or string edges.
    WordBoundary,
}

/// Case-insensitive keyword predicate. The keyword is stored lowercased.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordFilter {
    keyword: String,
    mode: MatchMode,
}

impl KeywordFilter {
    pub fn new(keyword: &str, mode: MatchMode) -> Result<Self, CorpusError> {
        let keyword = keyword.trim().to_lowercase();
        if keyword.is_empty() {
            return Err(CorpusError::EmptyKeyword);
        }
        Ok(KeywordFilter { keyword, mode })
    }

    pub fn keyword(&self) -> &str {
        &self.keyword
    }

    pub fn mode(&self) -> MatchMode {
        self.mode
    }

    pub fn matches(&self, text: &str) -> bool {
        let lowered = text.to_lowercase();
        match self.mode {
            MatchMode::Substring => lowered.contains(&self.keyword),
            MatchMode::WordBoundary => contains_delimited(&lowered, &self.keyword),
        }
    }
}

fn contains_delimited(haystack: &str, needle: &str) -> bool {
    let mut start = 0;
    while let Some(found) = haystack[start..].find(needle) {
        let begin = start + found;
        let end = begin + needle.len();
        let before_ok = haystack[..begin].chars().next_back().is_none_or(|c| !c.is_alphanumeric());
        let after_ok = haystack[end..].chars().next().is_none_or(|c| !c.is_alphanumeric());
        if before_ok && after_ok {
            return true;
        }
        // Advance one character so overlapping candidates are still seen.
        match haystack[begin..].chars().next() {
            Some(c) => start = begin + c.len_utf8(),
            None => break,
        }
    }
    false
}

/// Keep the records whose raw text matches the filter, preserving order.
pub fn filter_keyword<I>(records: I, filter: &KeywordFilter) -> Vec<TweetRecord>
where
    I: IntoIterator<Item = TweetRecord>,
{
    records
        .into_iter()
        .filter(|r| filter.matches(&r.raw_text))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse_one(row: &str) -> (Vec<TweetRecord>, ParseStats) {
        parse_sentiment140(row.as_bytes()).unwrap()
    }

    #[test]
    fn parses_negative_row() {
        let row = r#""0","1468","Mon Apr 06 22:19:45 PDT 2009","NO_QUERY","bob","my car broke""#;
        let (records, stats) = parse_one(row);
        assert_eq!(records.len(), 1);
        let rec = &records[0];
        assert_eq!(rec.label, SentimentLabel::Negative);
        assert_eq!(rec.tweet_id, 1468);
        assert_eq!(rec.user, "bob");
        assert_eq!(rec.raw_text, "my car broke");
        let ts = rec.timestamp.as_ref().unwrap();
        assert_eq!(ts.hour, 22);
        assert_eq!(ts.weekday, Weekday::Mon);
        assert_eq!(stats.records_emitted, 1);
        assert_eq!(stats.skipped(), 0);
    }

    #[test]
    fn parses_positive_row() {
        let (records, _) = parse_one(r#""4","7","Sat May 16 07:00:00 PDT 2009","NO_QUERY","amy","I love it""#);
        assert_eq!(records[0].label, SentimentLabel::Positive);
    }

    #[test]
    fn skips_wrong_field_count() {
        let (records, stats) = parse_one(r#""0","1468","Mon Apr 06 22:19:45 PDT 2009","NO_QUERY","bob""#);
        assert!(records.is_empty());
        assert_eq!(stats.skipped_field_count, 1);
        assert_eq!(stats.rows_read, 1);
    }

    #[test]
    fn skips_neutral_and_garbage_labels() {
        let data = "\"2\",\"1\",\"Mon Apr 06 22:19:45 PDT 2009\",\"NO_QUERY\",\"a\",\"meh\"\n\
                    \"9\",\"2\",\"Mon Apr 06 22:19:45 PDT 2009\",\"NO_QUERY\",\"b\",\"hi there\"\n\
                    \"4\",\"3\",\"Mon Apr 06 22:19:45 PDT 2009\",\"NO_QUERY\",\"c\",\"fine\"";
        let (records, stats) = parse_sentiment140(data.as_bytes()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(stats.skipped_bad_label, 2);
        assert_eq!(stats.rows_read, stats.records_emitted + stats.skipped());
    }

    #[test]
    fn bad_date_keeps_record_without_timestamp() {
        let (records, stats) = parse_one(r#""0","1","garbled","NO_QUERY","a","some text""#);
        assert_eq!(records.len(), 1);
        assert!(records[0].timestamp.is_none());
        assert_eq!(stats.missing_timestamps, 1);
    }

    #[test]
    fn latin1_bytes_survive() {
        let mut row = Vec::new();
        row.extend_from_slice(b"\"0\",\"1\",\"Mon Apr 06 22:19:45 PDT 2009\",\"NO_QUERY\",\"a\",\"caf");
        row.push(0xE9); // 'é' in Latin-1, invalid as a lone UTF-8 byte
        row.extend_from_slice(b" trip\"");
        let (records, stats) = parse_sentiment140(row.as_slice()).unwrap();
        assert_eq!(records[0].raw_text, "café trip");
        assert_eq!(stats.skipped(), 0);
    }

    #[test]
    fn parse_timestamp_examples() {
        let ts = parse_timestamp("Mon Apr 06 22:19:45 PDT 2009").unwrap();
        assert_eq!(
            (ts.weekday, ts.month, ts.day, ts.hour, ts.tz.as_str(), ts.year),
            (Weekday::Mon, Month::Apr, 6, 22, "PDT", 2009)
        );
        let ts = parse_timestamp("Sat May 16 07:00:00 PDT 2009").unwrap();
        assert_eq!((ts.hour, ts.weekday), (7, Weekday::Sat));
        assert!(parse_timestamp("garbled").is_none());
        assert!(parse_timestamp("Mon Apr 06 25:19:45 PDT 2009").is_none());
        assert!(parse_timestamp("Xyz Apr 06 22:19:45 PDT 2009").is_none());
        assert!(parse_timestamp("Mon Apr 00 22:19:45 PDT 2009").is_none());
    }

    #[test]
    fn timestamp_display_round_trips() {
        let raw = "Mon Apr 06 22:19:45 PDT 2009";
        let ts = parse_timestamp(raw).unwrap();
        assert_eq!(ts.to_string(), raw);
    }

    fn record_with_text(id: u64, text: &str) -> TweetRecord {
        TweetRecord {
            label: SentimentLabel::Negative,
            tweet_id: id,
            raw_date: "Mon Apr 06 22:19:45 PDT 2009".into(),
            timestamp: parse_timestamp("Mon Apr 06 22:19:45 PDT 2009"),
            query_flag: "NO_QUERY".into(),
            user: "u".into(),
            raw_text: text.into(),
        }
    }

    #[test]
    fn substring_mode_admits_embedded_keyword() {
        let filter = KeywordFilter::new("car", MatchMode::Substring).unwrap();
        assert!(filter.matches("My CARD is lost"));
        assert!(filter.matches("scary movie"));
    }

    #[test]
    fn word_boundary_mode_requires_delimiters() {
        let filter = KeywordFilter::new("car", MatchMode::WordBoundary).unwrap();
        assert!(filter.matches("I love my car"));
        assert!(filter.matches("car!"));
        assert!(filter.matches("a car, parked"));
        assert!(!filter.matches("scary movie"));
        assert!(!filter.matches("My CARD is lost"));
        // first occurrence embedded, later occurrence delimited
        assert!(filter.matches("carcar car"));
    }

    #[test]
    fn keyword_is_lowercased_and_nonempty() {
        let filter = KeywordFilter::new("  CaR ", MatchMode::Substring).unwrap();
        assert_eq!(filter.keyword(), "car");
        assert!(matches!(
            KeywordFilter::new("   ", MatchMode::Substring),
            Err(CorpusError::EmptyKeyword)
        ));
    }

    #[test]
    fn filter_preserves_order_and_is_idempotent() {
        let records = vec![
            record_with_text(1, "my car"),
            record_with_text(2, "no match"),
            record_with_text(3, "CARTOON night"),
        ];
        let filter = KeywordFilter::new("car", MatchMode::Substring).unwrap();
        let once = filter_keyword(records, &filter);
        assert_eq!(once.iter().map(|r| r.tweet_id).collect::<Vec<_>>(), vec![1, 3]);
        let twice = filter_keyword(once.clone(), &filter);
        assert_eq!(once, twice);
    }

    #[test]
    fn well_formed_row_round_trips() {
        let row = r#""4","99","Sun Jun 07 02:28:48 UTC 2009","NO_QUERY","a b","text with ""quotes"", commas""#;
        let (records, _) = parse_one(row);
        let mut out = Vec::new();
        write_records(&records, &mut out).unwrap();
        let (again, _) = parse_sentiment140(out.as_slice()).unwrap();
        assert_eq!(records, again);
    }

    proptest! {
        #[test]
        fn round_trip_preserves_all_six_fields(
            code in prop_oneof![Just("0"), Just("4")],
            id in 0u64..u64::MAX,
            date in "[ -~]{0,30}",
            flag in "[ -~]{0,12}",
            user in "[ -~]{0,15}",
            text in "[ -~]{1,60}",
        ) {
            let mut out = Vec::new();
            {
                let mut w = csv::WriterBuilder::new()
                    .quote_style(csv::QuoteStyle::Always)
                    .from_writer(&mut out);
                w.write_record([code, &id.to_string(), &date, &flag, &user, &text]).unwrap();
            }
            let (records, stats) = parse_sentiment140(out.as_slice()).unwrap();
            prop_assert_eq!(records.len(), 1);
            let fields = records[0].csv_fields();
            prop_assert_eq!(&fields[0], code);
            prop_assert_eq!(fields[1].clone(), id.to_string());
            prop_assert_eq!(&fields[2], &date);
            prop_assert_eq!(&fields[3], &flag);
            prop_assert_eq!(&fields[4], &user);
            prop_assert_eq!(&fields[5], &text);
            prop_assert_eq!(stats.rows_read, stats.records_emitted + stats.skipped());

            let mut again = Vec::new();
            write_records(&records, &mut again).unwrap();
            let (reparsed, _) = parse_sentiment140(again.as_slice()).unwrap();
            prop_assert_eq!(reparsed, records);
        }

        #[test]
        fn substring_outputs_really_contain_keyword(texts in proptest::collection::vec("[ -~]{1,40}", 0..20)) {
            let filter = KeywordFilter::new("car", MatchMode::Substring).unwrap();
            let records: Vec<TweetRecord> = texts
                .iter()
                .enumerate()
                .map(|(i, t)| record_with_text(i as u64, t))
                .collect();
            let kept = filter_keyword(records, &filter);
            for r in &kept {
                prop_assert!(r.raw_text.to_lowercase().contains("car"));
            }
        }

        #[test]
        fn word_boundary_agrees_with_a_regex_oracle(texts in proptest::collection::vec("[ -~a-zA-Z]{0,40}", 0..25)) {
            let oracle = regex::Regex::new(r"(?:^|[^a-zA-Z0-9])car(?:[^a-zA-Z0-9]|$)").unwrap();
            let filter = KeywordFilter::new("car", MatchMode::WordBoundary).unwrap();
            for (i, text) in texts.iter().enumerate() {
                let expected = oracle.is_match(&text.to_lowercase());
                let record = record_with_text(i as u64, text);
                prop_assert_eq!(filter.matches(&record.raw_text), expected, "text {:?}", text);
            }
        }
    }
}
