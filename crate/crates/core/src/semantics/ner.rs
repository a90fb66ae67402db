//! Gazetteer-based entity extraction over raw (uncleaned) tweet text.
//!
//! Matching is case-insensitive over alphanumeric token runs; the original
//! surface casing and byte span are preserved on each hit. The shipped
//! default dictionary covers common automotive brands and product terms.

use std::collections::HashMap;
use std::io::Read;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SemanticsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Brand,
    ProductTerm,
}

impl EntityKind {
    pub fn label(self) -> &'static str {
        match self {
            EntityKind::Brand => "brand",
            EntityKind::ProductTerm => "product",
        }
    }

    fn parse(raw: &str) -> Option<Self> {
        match raw.trim().to_lowercase().as_str() {
            "brand" => Some(EntityKind::Brand),
            "product" | "product_term" => Some(EntityKind::ProductTerm),
            _ => None,
        }
    }
}

/// Lowercase surface form -> entity kind dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gazetteer {
    entries: HashMap<String, EntityKind>,
}

const DEFAULT_GAZETTEER: &str = include_str!("../../data/gazetteer_auto.csv");

impl Default for Gazetteer {
    fn default() -> Self {
        Gazetteer::from_reader(DEFAULT_GAZETTEER.as_bytes()).expect("embedded gazetteer is valid")
    }
}

impl Gazetteer {
    /// Load a two-column `surface,kind` CSV; a `surface,kind` header row is
    /// allowed. Kinds are `brand` or `product`. Surfaces are lowercased and
    /// must be unique.
    pub fn from_reader<R: Read>(source: R) -> Result<Self, SemanticsError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(source);
        let mut entries = HashMap::new();
        for (i, row) in reader.records().enumerate() {
            let line = i as u64 + 1;
            let row = row.map_err(|e| SemanticsError::MalformedGazetteerRow {
                line,
                reason: e.to_string(),
            })?;
            if line == 1 && row.get(0) == Some("surface") {
                continue;
            }
            if row.len() != 2 {
                return Err(SemanticsError::MalformedGazetteerRow {
                    line,
                    reason: format!("expected 2 fields, got {}", row.len()),
                });
            }
            let surface = row[0].to_lowercase();
            if surface.is_empty() {
                return Err(SemanticsError::MalformedGazetteerRow {
                    line,
                    reason: "empty surface form".into(),
                });
            }
            let kind = EntityKind::parse(&row[1]).ok_or_else(|| SemanticsError::MalformedGazetteerRow {
                line,
                reason: format!("unknown entity kind {:?}", &row[1]),
            })?;
            if entries.insert(surface.clone(), kind).is_some() {
                return Err(SemanticsError::DuplicateSurface(surface));
            }
        }
        Ok(Gazetteer { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, SemanticsError> {
        Gazetteer::from_reader(std::fs::File::open(path)?)
    }

    pub fn lookup(&self, surface_lower: &str) -> Option<EntityKind> {
        self.entries.get(surface_lower).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// One dictionary hit. `span` is the byte range in the source text, so
/// `&text[span]` reproduces `surface` exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub surface: String,
    pub kind: EntityKind,
    pub span: Range<usize>,
}

/// Scan alphanumeric token runs of the raw text against the gazetteer,
/// left to right. Tokens are delimited by whitespace and punctuation.
pub fn extract_entities(raw_text: &str, gazetteer: &Gazetteer) -> Vec<Entity> {
    let mut entities = Vec::new();
    let mut chars = raw_text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if !c.is_alphanumeric() {
            chars.next();
            continue;
        }
        let mut end = start;
        while let Some(&(i, c)) = chars.peek() {
            if c.is_alphanumeric() {
                end = i + c.len_utf8();
                chars.next();
            } else {
                break;
            }
        }
        let token = &raw_text[start..end];
        if let Some(kind) = gazetteer.lookup(&token.to_lowercase()) {
            entities.push(Entity {
                surface: token.to_string(),
                kind,
                span: start..end,
            });
        }
    }
    entities
}

/// Aggregated entity counts, sorted by descending count with lexicographic
/// tie-breaks on the lowercased surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntityCount {
    pub surface: String,
    pub kind: EntityKind,
    pub count: u64,
}

pub fn entity_frequencies<'a, I>(texts: I, gazetteer: &Gazetteer) -> Vec<EntityCount>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: HashMap<(String, EntityKind), u64> = HashMap::new();
    for text in texts {
        for entity in extract_entities(text, gazetteer) {
            *counts.entry((entity.surface.to_lowercase(), entity.kind)).or_insert(0) += 1;
        }
    }
    let mut rows: Vec<EntityCount> = counts
        .into_iter()
        .map(|((surface, kind), count)| EntityCount { surface, kind, count })
        .collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.surface.cmp(&b.surface)));
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_gazetteer_has_brands_and_products() {
        let g = Gazetteer::default();
        assert!(g.len() >= 50, "got {}", g.len());
        assert_eq!(g.lookup("tesla"), Some(EntityKind::Brand));
        assert_eq!(g.lookup("sedan"), Some(EntityKind::ProductTerm));
        assert_eq!(g.lookup("banana"), None);
    }

    #[test]
    fn extracts_brand_with_original_casing() {
        let g = Gazetteer::default();
        let entities = extract_entities("My Tesla needs a wash", &g);
        assert_eq!(entities.len(), 1);
        assert_eq!(entities[0].surface, "Tesla");
        assert_eq!(entities[0].kind, EntityKind::Brand);
    }

    #[test]
    fn extracts_product_term_next_to_punctuation() {
        let g = Gazetteer::default();
        let entities = extract_entities("nice sedan!", &g);
        assert_eq!(entities.len(), 1);
        assert_eq!(entities[0].surface, "sedan");
        assert_eq!(entities[0].kind, EntityKind::ProductTerm);
    }

    #[test]
    fn no_hits_on_unrelated_text() {
        let g = Gazetteer::default();
        assert!(extract_entities("banana bread", &g).is_empty());
    }

    #[test]
    fn spans_slice_back_to_surfaces() {
        let g = Gazetteer::default();
        let text = "Saw a BMW, then a bmw… loved the SEDAN — café vibes";
        let entities = extract_entities(text, &g);
        assert_eq!(entities.len(), 3);
        for e in &entities {
            assert_eq!(&text[e.span.clone()], e.surface);
        }
        assert_eq!(entities[0].surface, "BMW");
        assert_eq!(entities[1].surface, "bmw");
        assert_eq!(entities[2].surface, "SEDAN");
    }

    #[test]
    fn embedded_keyword_is_not_a_token_hit() {
        let g = Gazetteer::default();
        // "cartoon" contains "car" but is a single token with no entry
        assert!(extract_entities("cartoon time", &g).is_empty());
        assert_eq!(extract_entities("car2go ride", &g).len(), 0);
    }

    #[test]
    fn frequencies_fold_case_and_sort() {
        let g = Gazetteer::default();
        let texts = ["My Tesla and her tesla", "a sedan and a Tesla", "sedan again"];
        let rows = entity_frequencies(texts.iter().copied(), &g);
        assert_eq!(rows[0].surface, "tesla");
        assert_eq!(rows[0].count, 3);
        assert_eq!(rows[1].surface, "sedan");
        assert_eq!(rows[1].count, 2);
    }

    #[test]
    fn custom_gazetteer_parsing() {
        let g = Gazetteer::from_reader("surface,kind\nAcme,brand\nwidget,product\n".as_bytes()).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.lookup("acme"), Some(EntityKind::Brand));

        assert!(matches!(
            Gazetteer::from_reader("a,brand\na,product".as_bytes()),
            Err(SemanticsError::DuplicateSurface(s)) if s == "a"
        ));
        assert!(matches!(
            Gazetteer::from_reader("a,vehicle_kind".as_bytes()),
            Err(SemanticsError::MalformedGazetteerRow { line: 1, .. })
        ));
        assert!(matches!(
            Gazetteer::from_reader("only_one_field".as_bytes()),
            Err(SemanticsError::MalformedGazetteerRow { line: 1, .. })
        ));
    }
}
