//! End-to-end orchestration: parse, filter, preprocess, run every analysis
//! stage, and emit the consolidated report plus plot-data CSVs.
//!
//! Stages are independent: one failing marks its section `failed` with a
//! reason while the rest still run. Only a missing input, an invalid
//! configuration, or an empty keyword subset abort the whole run. Two runs
//! with identical configuration produce byte-identical `report.json`.

use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{
    split_stratified, train_linear_svm, train_naive_bayes, ConfusionMatrix, EvalReport, SvmConfig,
};
use crate::corpus::{CorpusError, KeywordFilter, MatchMode, ParseStats, RecordReader, TweetRecord};
use crate::features::{build_vocabulary, build_vocabulary_from_tokens, tfidf_rank, TermStats};
use crate::preprocess::{
    build_document, normalize_text_with, tokenize_and_filter, CategoryThresholds, Document,
    NormalizeOptions, StopwordList,
};
use crate::semantics::{entity_frequencies, train_sgns, EntityCount, Gazetteer, SgnsConfig};
use crate::topics::{fit_lda, LdaConfig, WordProbability};
use crate::trends::{aggregate, summarize, AxisPeaks, BucketAxis, TrendTable};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("cannot read input {path}: {source}")]
    Input { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("no records match keyword {0:?}")]
    NoMatches(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NaiveBayes,
    Svm,
}

impl ClassifierKind {
    /// Short name used in report sections and `eval_<model>.txt` files.
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "nb",
            ClassifierKind::Svm => "svm",
        }
    }
}

/// Which corpus the term ranking runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermScope {
    /// The keyword-filtered subset.
    Subset,
    /// Every parsed record in the input file.
    Corpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct StageToggles {
    pub trends: bool,
    pub terms: bool,
    pub classify: bool,
    pub similarity: bool,
    pub entities: bool,
    pub topics: bool,
}

impl Default for StageToggles {
    fn default() -> Self {
        StageToggles {
            trends: true,
            terms: true,
            classify: true,
            similarity: true,
            entities: true,
            topics: true,
        }
    }
}

/// Complete pipeline configuration. Loads from a TOML file with any subset
/// of fields; everything else takes these defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input: PathBuf,
    pub keyword: String,
    pub mode: MatchMode,
    pub drop_hashtag_text: bool,
    pub stopwords_path: Option<PathBuf>,
    pub char_thresholds: [usize; 3],
    pub word_thresholds: [usize; 3],
    pub test_fraction: f64,
    pub seed: u64,
    pub nb_alpha: f64,
    pub svm_lambda: f64,
    pub svm_epochs: u32,
    pub classifiers: Vec<ClassifierKind>,
    pub terms_k: usize,
    pub terms_scope: TermScope,
    /// Similarity query word; defaults to the keyword.
    pub similarity_query: Option<String>,
    pub similar_k: usize,
    pub lda_min_count: u32,
    /// Tokenize without stopword removal for topic modeling only.
    pub lda_keep_stopwords: bool,
    pub gazetteer_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    // nested tables stay last so the config serializes cleanly to TOML
    pub embedding: SgnsConfig,
    pub lda: LdaConfig,
    pub stages: StageToggles,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            keyword: "car".into(),
            mode: MatchMode::Substring,
            drop_hashtag_text: false,
            stopwords_path: None,
            char_thresholds: [40, 80, 120],
            word_thresholds: [5, 12, 20],
            test_fraction: 0.22,
            seed: 42,
            nb_alpha: 1.0,
            svm_lambda: 1e-4,
            svm_epochs: 10,
            classifiers: vec![ClassifierKind::NaiveBayes, ClassifierKind::Svm],
            terms_k: 20,
            terms_scope: TermScope::Subset,
            similarity_query: None,
            similar_k: 10,
            lda_min_count: 5,
            lda_keep_stopwords: false,
            gazetteer_path: None,
            out_dir: PathBuf::from("analysis"),
            embedding: SgnsConfig::default(),
            lda: LdaConfig::default(),
            stages: StageToggles::default(),
        }
    }
}

/// One report section: present data, or the reason it is absent.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Section<T> {
    Ok { data: T },
    Skipped { reason: String },
    Failed { reason: String },
}

impl<T> Section<T> {
    fn from_result<E: std::fmt::Display>(result: Result<T, E>) -> Self {
        match result {
            Ok(data) => Section::Ok { data },
            Err(err) => Section::Failed { reason: err.to_string() },
        }
    }

    fn disabled() -> Self {
        Section::Skipped {
            reason: "disabled by configuration".into(),
        }
    }

    pub fn data(&self) -> Option<&T> {
        match self {
            Section::Ok { data } => Some(data),
            _ => None,
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Section::Ok { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSection {
    pub input: String,
    pub keyword: String,
    pub mode: MatchMode,
    pub parse: ParseStats,
    pub matched_records: u64,
    pub matched_without_timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentimentSection {
    pub total_docs: u64,
    pub negative_count: u64,
    pub positive_count: u64,
    pub negative_share: f64,
    pub positive_share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendsSection {
    pub tables: Vec<TrendTable>,
    pub peaks: Vec<AxisPeaks>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedTerm {
    pub rank: usize,
    pub word: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarWord {
    pub rank: usize,
    pub word: String,
    pub cosine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarSection {
    pub query: String,
    pub neighbors: Vec<SimilarWord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicRow {
    pub topic: usize,
    pub words: Vec<WordProbability>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicsSection {
    pub keep_stopwords: bool,
    pub topics: Vec<TopicRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelEval {
    pub model: String,
    pub train_size: u64,
    pub test_size: u64,
    pub report: EvalReport,
}

/// The consolidated analysis document written to `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub corpus: CorpusSection,
    pub sentiment: Section<SentimentSection>,
    pub trends: Section<TrendsSection>,
    pub terms: Section<Vec<RankedTerm>>,
    pub similar: Section<SimilarSection>,
    pub entities: Section<Vec<EntityCount>>,
    pub topics: Section<TopicsSection>,
    pub evaluations: Section<Vec<ModelEval>>,
}

fn invalid<E: std::fmt::Display>(err: E) -> PipelineError {
    PipelineError::InvalidConfig(err.to_string())
}

/// Run every enabled stage over the keyword subset of the input file.
pub fn run_pipeline(config: &RunConfig) -> Result<AnalysisReport, PipelineError> {
    let filter = KeywordFilter::new(&config.keyword, config.mode).map_err(invalid)?;
    let thresholds = CategoryThresholds::new(config.char_thresholds, config.word_thresholds).map_err(invalid)?;
    if !(config.test_fraction > 0.0 && config.test_fraction < 1.0) {
        return Err(PipelineError::InvalidConfig(format!(
            "test fraction must lie strictly between 0 and 1, got {}",
            config.test_fraction
        )));
    }
    let stopwords = match &config.stopwords_path {
        Some(path) => StopwordList::from_path(path).map_err(invalid)?,
        None => StopwordList::default(),
    };
    let gazetteer = match &config.gazetteer_path {
        Some(path) => Gazetteer::from_path(path).map_err(invalid)?,
        None => Gazetteer::default(),
    };
    let norm_opts = NormalizeOptions {
        drop_hashtag_text: config.drop_hashtag_text,
    };

    let file = fs::File::open(&config.input).map_err(|source| PipelineError::Input {
        path: config.input.clone(),
        source,
    })?;
    let mut reader = RecordReader::new(BufReader::new(file));
    let rank_full_corpus = config.stages.terms && config.terms_scope == TermScope::Corpus;
    let mut corpus_terms = TermStats::new();
    let mut records: Vec<TweetRecord> = Vec::new();
    for record in reader.by_ref() {
        let record = record?;
        if rank_full_corpus {
            let cleaned = normalize_text_with(&record.raw_text, &norm_opts);
            corpus_terms.add_doc(&tokenize_and_filter(&cleaned, &stopwords));
        }
        if filter.matches(&record.raw_text) {
            records.push(record);
        }
    }
    let parse_stats = reader.into_stats();
    if records.is_empty() {
        return Err(PipelineError::NoMatches(config.keyword.clone()));
    }

    let docs: Vec<Document> = records
        .iter()
        .map(|r| build_document(r, &stopwords, &thresholds, &norm_opts))
        .collect();

    let corpus = CorpusSection {
        input: config.input.display().to_string(),
        keyword: filter.keyword().to_string(),
        mode: config.mode,
        parse: parse_stats,
        matched_records: records.len() as u64,
        matched_without_timestamp: docs.iter().filter(|d| d.timestamp.is_none()).count() as u64,
    };

    let tables: Vec<TrendTable> = if config.stages.trends {
        BucketAxis::ALL.iter().map(|&axis| aggregate(&docs, axis)).collect()
    } else {
        Vec::new()
    };
    let summary = summarize(&docs, &tables).expect("subset is non-empty");
    let sentiment = Section::Ok {
        data: SentimentSection {
            total_docs: summary.total_docs,
            negative_count: summary.negative_count,
            positive_count: summary.positive_count,
            negative_share: summary.negative_share,
            positive_share: summary.positive_share,
        },
    };
    let trends = if config.stages.trends {
        Section::Ok {
            data: TrendsSection {
                tables,
                peaks: summary.peaks,
            },
        }
    } else {
        Section::disabled()
    };

    let terms = if config.stages.terms {
        let ranked = match config.terms_scope {
            TermScope::Subset => {
                build_vocabulary(&docs, 1).and_then(|vocab| tfidf_rank(&docs, &vocab, config.terms_k))
            }
            TermScope::Corpus => corpus_terms.rank(1, config.terms_k),
        };
        Section::from_result(ranked.map(|list| {
            list.into_iter()
                .enumerate()
                .map(|(i, (word, score))| RankedTerm {
                    rank: i + 1,
                    word,
                    score,
                })
                .collect()
        }))
    } else {
        Section::disabled()
    };

    let evaluations = if config.stages.classify {
        Section::from_result(run_classifiers(config, &docs))
    } else {
        Section::disabled()
    };

    let similar = if config.stages.similarity {
        let query = config
            .similarity_query
            .clone()
            .unwrap_or_else(|| filter.keyword().to_string());
        Section::from_result(train_sgns(&docs, &config.embedding).and_then(|emb| {
            emb.most_similar(&query, config.similar_k).map(|neighbors| SimilarSection {
                query,
                neighbors: neighbors
                    .into_iter()
                    .enumerate()
                    .map(|(i, (word, cosine))| SimilarWord {
                        rank: i + 1,
                        word,
                        cosine,
                    })
                    .collect(),
            })
        }))
    } else {
        Section::disabled()
    };

    let entities = if config.stages.entities {
        Section::Ok {
            data: entity_frequencies(records.iter().map(|r| r.raw_text.as_str()), &gazetteer),
        }
    } else {
        Section::disabled()
    };

    let topics = if config.stages.topics {
        Section::from_result(run_topics(config, &records, &docs, &norm_opts))
    } else {
        Section::disabled()
    };

    Ok(AnalysisReport {
        corpus,
        sentiment,
        trends,
        terms,
        similar,
        entities,
        topics,
        evaluations,
    })
}

fn run_classifiers(config: &RunConfig, docs: &[Document]) -> Result<Vec<ModelEval>, String> {
    let modeled: Vec<Document> = docs.iter().filter(|d| d.has_tokens()).cloned().collect();
    let (train, test) =
        split_stratified(modeled, config.test_fraction, config.seed).map_err(|e| e.to_string())?;
    if test.is_empty() {
        return Err("test split is empty; increase the corpus or the test fraction".into());
    }
    let vocab = Arc::new(build_vocabulary(&train, 1).map_err(|e| e.to_string())?);
    let mut evals = Vec::new();
    for kind in &config.classifiers {
        let pairs: Vec<_> = match kind {
            ClassifierKind::NaiveBayes => {
                let model =
                    train_naive_bayes(&train, vocab.clone(), config.nb_alpha).map_err(|e| e.to_string())?;
                test.iter().map(|d| (d.label, model.predict(d).0)).collect()
            }
            ClassifierKind::Svm => {
                let svm_config = SvmConfig {
                    lambda: config.svm_lambda,
                    epochs: config.svm_epochs,
                    seed: config.seed,
                };
                let model = train_linear_svm(&train, vocab.clone(), &svm_config).map_err(|e| e.to_string())?;
                test.iter().map(|d| (d.label, model.predict(d).0)).collect()
            }
        };
        evals.push(ModelEval {
            model: kind.name().to_string(),
            train_size: train.len() as u64,
            test_size: test.len() as u64,
            report: EvalReport::from_confusion(&ConfusionMatrix::from_pairs(pairs)),
        });
    }
    Ok(evals)
}

fn run_topics(
    config: &RunConfig,
    records: &[TweetRecord],
    docs: &[Document],
    norm_opts: &NormalizeOptions,
) -> Result<TopicsSection, String> {
    let token_lists: Vec<Vec<String>> = if config.lda_keep_stopwords {
        let none = StopwordList::none();
        records
            .iter()
            .map(|r| tokenize_and_filter(&normalize_text_with(&r.raw_text, norm_opts), &none))
            .collect()
    } else {
        docs.iter().map(|d| d.tokens.clone()).collect()
    };
    let slices: Vec<&[String]> = token_lists.iter().map(Vec::as_slice).collect();
    let vocab = Arc::new(build_vocabulary_from_tokens(slices, config.lda_min_count).map_err(|e| e.to_string())?);
    let encoded: Vec<Vec<u32>> = token_lists
        .iter()
        .map(|tokens| tokens.iter().filter_map(|t| vocab.index_of(t)).map(|i| i as u32).collect::<Vec<u32>>())
        .filter(|doc| !doc.is_empty())
        .collect();
    let model = fit_lda(encoded, vocab, &config.lda).map_err(|e| e.to_string())?;
    Ok(TopicsSection {
        keep_stopwords: config.lda_keep_stopwords,
        topics: model
            .top_words(10)
            .into_iter()
            .enumerate()
            .map(|(topic, words)| TopicRow { topic, words })
            .collect(),
    })
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>, PipelineError> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|source| PipelineError::Output {
            path: path.to_path_buf(),
            source,
        })
}

fn finish<T>(path: &Path, result: std::io::Result<T>) -> Result<T, PipelineError> {
    result.map_err(|source| PipelineError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// Write `report.json` plus one plot-data file per present section.
/// Returns the list of files written, in write order.
pub fn emit_report(report: &AnalysisReport, out_dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
    fs::create_dir_all(out_dir).map_err(|source| PipelineError::Output {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut manifest = Vec::new();

    let path = out_dir.join("report.json");
    {
        let mut out = create_file(&path)?;
        finish(
            &path,
            serde_json::to_writer_pretty(&mut out, report).map_err(std::io::Error::other),
        )?;
        finish(&path, out.write_all(b"\n"))?;
        finish(&path, out.flush())?;
    }
    manifest.push(path);

    if let Some(trends) = report.trends.data() {
        for table in &trends.tables {
            let path = out_dir.join(format!("trends_{}.csv", table.axis.name()));
            let mut out = create_file(&path)?;
            finish(&path, table.write_csv(&mut out))?;
            finish(&path, out.flush())?;
            manifest.push(path);
        }
    }

    if let Some(terms) = report.terms.data() {
        let path = out_dir.join("terms_topk.csv");
        let mut out = create_file(&path)?;
        finish(&path, writeln!(out, "rank,word,score"))?;
        for term in terms {
            finish(&path, writeln!(out, "{},{},{:.6}", term.rank, term.word, term.score))?;
        }
        finish(&path, out.flush())?;
        manifest.push(path);
    }

    if let Some(similar) = report.similar.data() {
        let path = out_dir.join("similar_words.csv");
        let mut out = create_file(&path)?;
        finish(&path, writeln!(out, "rank,word,cosine"))?;
        for n in &similar.neighbors {
            finish(&path, writeln!(out, "{},{},{:.6}", n.rank, n.word, n.cosine))?;
        }
        finish(&path, out.flush())?;
        manifest.push(path);
    }

    if let Some(entities) = report.entities.data() {
        let path = out_dir.join("entities.csv");
        let mut out = create_file(&path)?;
        finish(&path, writeln!(out, "surface,kind,count"))?;
        for e in entities {
            finish(&path, writeln!(out, "{},{},{}", e.surface, e.kind.label(), e.count))?;
        }
        finish(&path, out.flush())?;
        manifest.push(path);
    }

    if let Some(topics) = report.topics.data() {
        let path = out_dir.join("topics.csv");
        let rows: Vec<Vec<WordProbability>> = topics.topics.iter().map(|t| t.words.clone()).collect();
        let mut out = create_file(&path)?;
        finish(&path, crate::topics::write_topics_csv(&rows, &mut out))?;
        finish(&path, out.flush())?;
        manifest.push(path);
    }

    if let Some(evals) = report.evaluations.data() {
        for eval in evals {
            let path = out_dir.join(format!("eval_{}.txt", eval.model));
            let mut out = create_file(&path)?;
            finish(&path, out.write_all(eval.report.render_text().as_bytes()))?;
            finish(&path, out.flush())?;
            manifest.push(path);
        }
    }

    Ok(manifest)
}
