//! Command-line interface for the sentiment-trend pipeline.
//!
//! `sentrend report` runs everything end to end; the other subcommands run
//! individual stages. On failure a machine-readable JSON error object is
//! printed to stderr and the exit code is nonzero.

use std::fs;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sentrend::classify::{
    evaluate, import_predictions, split_stratified, train_linear_svm, train_naive_bayes,
    ConfusionMatrix, EvalReport, SvmConfig,
};
use sentrend::corpus::{KeywordFilter, MatchMode, ParseStats, RecordReader, TweetRecord};
use sentrend::features::{build_vocabulary, tfidf_rank, TermStats};
use sentrend::pipeline::{emit_report, run_pipeline, ClassifierKind, RunConfig, TermScope};
use sentrend::preprocess::{
    build_document, normalize_text_with, tokenize_and_filter, CategoryThresholds, Document,
    NormalizeOptions, StopwordList,
};
use sentrend::semantics::{entity_frequencies, train_sgns, Gazetteer, SgnsConfig};
use sentrend::topics::{fit_lda, render_topic_table, write_topics_csv, LdaConfig};
use sentrend::trends::{aggregate, summarize, BucketAxis};

#[derive(Parser)]
#[command(
    name = "sentrend",
    version,
    about = "Batch sentiment-trend mining over labeled tweet corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Keyword anywhere in the lowercased text
    Substring,
    /// Keyword delimited by non-alphanumeric characters
    Word,
}

impl From<ModeArg> for MatchMode {
    fn from(mode: ModeArg) -> MatchMode {
        match mode {
            ModeArg::Substring => MatchMode::Substring,
            ModeArg::Word => MatchMode::WordBoundary,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScopeArg {
    /// Rank terms over the keyword-filtered subset
    Subset,
    /// Rank terms over the whole input file
    Corpus,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Nb,
    Svm,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SplitArg {
    /// Evaluate against every filtered document
    Full,
    /// Evaluate against the held-out test split
    Test,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Hour,
    Weekday,
    Month,
    Length,
    Wordcount,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StageArg {
    Trends,
    Terms,
    Classify,
    Similarity,
    Entities,
    Topics,
}

/// Flags shared by every corpus-reading subcommand.
#[derive(Args)]
struct InputArgs {
    /// Six-column Sentiment140 CSV (no header)
    #[arg(long, short = 'i')]
    input: PathBuf,
    /// Product keyword selecting the tweet subset
    #[arg(long, short = 'k')]
    keyword: String,
    /// Keyword matching semantics
    #[arg(long, value_enum, default_value_t = ModeArg::Substring)]
    mode: ModeArg,
    /// Stopword file, one word per line (defaults to the embedded list)
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Drop entire #tags instead of keeping the tag text
    #[arg(long)]
    drop_hashtags: bool,
}

impl InputArgs {
    fn filter(&self) -> Result<KeywordFilter> {
        Ok(KeywordFilter::new(&self.keyword, self.mode.into())?)
    }

    fn stopword_list(&self) -> Result<StopwordList> {
        Ok(match &self.stopwords {
            Some(path) => StopwordList::from_path(path)
                .with_context(|| format!("loading stopwords from {}", path.display()))?,
            None => StopwordList::default(),
        })
    }

    fn normalize_options(&self) -> NormalizeOptions {
        NormalizeOptions {
            drop_hashtag_text: self.drop_hashtags,
        }
    }

    fn load_subset(&self) -> Result<(Vec<TweetRecord>, ParseStats)> {
        let filter = self.filter()?;
        let file = fs::File::open(&self.input)
            .with_context(|| format!("cannot read input {}", self.input.display()))?;
        let mut reader = RecordReader::new(BufReader::new(file));
        let mut records = Vec::new();
        for record in reader.by_ref() {
            let record = record?;
            if filter.matches(&record.raw_text) {
                records.push(record);
            }
        }
        let stats = reader.into_stats();
        if records.is_empty() {
            bail!("no records match keyword {:?}", filter.keyword());
        }
        Ok((records, stats))
    }

    fn load_documents(&self) -> Result<Vec<Document>> {
        let (records, _) = self.load_subset()?;
        let stopwords = self.stopword_list()?;
        let thresholds = CategoryThresholds::default();
        let opts = self.normalize_options();
        Ok(records
            .iter()
            .map(|r| build_document(r, &stopwords, &thresholds, &opts))
            .collect())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Select tweets matching the keyword and re-emit them as CSV
    Filter {
        #[command(flatten)]
        input: InputArgs,
        /// Output file (stdout when omitted)
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Bucketed sentiment counts over time and size axes
    Trends {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = AxisArg::All)]
        axis: AxisArg,
        /// Directory for trends_<axis>.csv files (stdout summary either way)
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Top TF-IDF terms as rank,word,score CSV
    Terms {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, short = 'n', default_value_t = 20)]
        top: usize,
        #[arg(long, value_enum, default_value_t = ScopeArg::Subset)]
        scope: ScopeArg,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Train classifiers and print their held-out classification reports
    Train {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = ModelArg::All)]
        model: ModelArg,
        #[arg(long, default_value_t = 0.22)]
        test_fraction: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Naive Bayes smoothing
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// SVM regularization
        #[arg(long, default_value_t = 1e-4)]
        lambda: f64,
        /// SVM training epochs
        #[arg(long, default_value_t = 10)]
        epochs: u32,
        /// Also write eval_<model>.txt files here
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Score an imported prediction CSV (tweet_id,label_code[,confidence])
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, short = 'p')]
        predictions: PathBuf,
        #[arg(long, value_enum, default_value_t = SplitArg::Full)]
        split: SplitArg,
        #[arg(long, default_value_t = 0.22)]
        test_fraction: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Print the report as JSON instead of aligned text
        #[arg(long)]
        json: bool,
    },
    /// Nearest words to a query by embedding cosine similarity
    Similar {
        #[command(flatten)]
        input: InputArgs,
        /// Query word (defaults to the keyword)
        #[arg(long, short = 'q')]
        query: Option<String>,
        #[arg(long, short = 'n', default_value_t = 10)]
        top: usize,
        #[arg(long, default_value_t = 100)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        window: usize,
        #[arg(long, default_value_t = 5)]
        negatives: usize,
        #[arg(long, default_value_t = 5)]
        epochs: u32,
        #[arg(long, default_value_t = 5)]
        min_count: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Subsample frequent words at this threshold (e.g. 1e-3)
        #[arg(long)]
        subsample: Option<f64>,
        /// Write the trained vectors as text ("|V| d" header, then rows)
        #[arg(long)]
        save_embeddings: Option<PathBuf>,
    },
    /// Gazetteer entity frequencies as surface,kind,count CSV
    Entities {
        #[command(flatten)]
        input: InputArgs,
        /// Two-column surface,kind CSV (defaults to the embedded list)
        #[arg(long)]
        gazetteer: Option<PathBuf>,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Topic modeling; prints the aligned top-words table
    Topics {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, short = 'K', default_value_t = 4)]
        topics: usize,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.01)]
        beta: f64,
        #[arg(long, default_value_t = 1000)]
        iterations: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        min_count: u32,
        /// Keep stopwords in the topic-model token stream
        #[arg(long)]
        keep_stopwords: bool,
        /// Words shown per topic
        #[arg(long, short = 'n', default_value_t = 10)]
        top: usize,
        /// Also write topic,rank,word,probability CSV here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Full pipeline: every stage plus report.json and plot-data CSVs
    Report {
        /// TOML configuration file; flags below override it
        #[arg(long, short = 'c')]
        config: Option<PathBuf>,
        #[arg(long, short = 'i')]
        input: Option<PathBuf>,
        #[arg(long, short = 'k')]
        keyword: Option<String>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        test_fraction: Option<f64>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        gazetteer: Option<PathBuf>,
        /// Rank terms over the whole file instead of the subset
        #[arg(long)]
        terms_corpus: bool,
        /// Keep stopwords in the topic-model token stream
        #[arg(long)]
        keep_stopwords: bool,
        /// Skip a stage (repeatable)
        #[arg(long, value_enum)]
        skip: Vec<StageArg>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        let payload = serde_json::json!({ "error": format!("{err:#}") });
        eprintln!("{payload}");
        std::process::exit(1);
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(
            fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Filter { input, output } => {
            let (records, stats) = input.load_subset()?;
            let mut out = open_output(&output)?;
            sentrend::corpus::write_records(&records, &mut out)?;
            out.flush()?;
            eprintln!(
                "{}",
                serde_json::json!({
                    "rows_read": stats.rows_read,
                    "rows_skipped": stats.skipped(),
                    "matched": records.len(),
                })
            );
        }
        Command::Trends { input, axis, out_dir } => {
            let docs = input.load_documents()?;
            let axes: Vec<BucketAxis> = match axis {
                AxisArg::Hour => vec![BucketAxis::Hour],
                AxisArg::Weekday => vec![BucketAxis::Weekday],
                AxisArg::Month => vec![BucketAxis::Month],
                AxisArg::Length => vec![BucketAxis::LengthCategory],
                AxisArg::Wordcount => vec![BucketAxis::WordCountCategory],
                AxisArg::All => BucketAxis::ALL.to_vec(),
            };
            let tables: Vec<_> = axes.iter().map(|&a| aggregate(&docs, a)).collect();
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir)?;
                for table in &tables {
                    let path = dir.join(format!("trends_{}.csv", table.axis.name()));
                    let mut file = fs::File::create(&path)
                        .with_context(|| format!("cannot write {}", path.display()))?;
                    table.write_csv(&mut file)?;
                    eprintln!("wrote {}", path.display());
                }
            }
            let summary = summarize(&docs, &tables)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Terms { input, top, scope, output } => {
            let ranked = match scope {
                ScopeArg::Subset => {
                    let docs = input.load_documents()?;
                    let vocab = build_vocabulary(&docs, 1)?;
                    tfidf_rank(&docs, &vocab, top)?
                }
                ScopeArg::Corpus => {
                    let stopwords = input.stopword_list()?;
                    let opts = input.normalize_options();
                    let file = fs::File::open(&input.input)
                        .with_context(|| format!("cannot read input {}", input.input.display()))?;
                    let mut stats = TermStats::new();
                    for record in RecordReader::new(BufReader::new(file)) {
                        let record = record?;
                        let cleaned = normalize_text_with(&record.raw_text, &opts);
                        stats.add_doc(&tokenize_and_filter(&cleaned, &stopwords));
                    }
                    stats.rank(1, top)?
                }
            };
            let mut out = open_output(&output)?;
            writeln!(out, "rank,word,score")?;
            for (i, (word, score)) in ranked.iter().enumerate() {
                writeln!(out, "{},{},{score:.6}", i + 1, word)?;
            }
            out.flush()?;
        }
        Command::Train {
            input,
            model,
            test_fraction,
            seed,
            alpha,
            lambda,
            epochs,
            out_dir,
        } => {
            let docs = input.load_documents()?;
            let modeled: Vec<Document> = docs.into_iter().filter(|d| d.has_tokens()).collect();
            let (train, test) = split_stratified(modeled, test_fraction, seed)?;
            if test.is_empty() {
                bail!("test split is empty; corpus too small for fraction {test_fraction}");
            }
            let vocab = Arc::new(build_vocabulary(&train, 1)?);
            let kinds: Vec<ClassifierKind> = match model {
                ModelArg::Nb => vec![ClassifierKind::NaiveBayes],
                ModelArg::Svm => vec![ClassifierKind::Svm],
                ModelArg::All => vec![ClassifierKind::NaiveBayes, ClassifierKind::Svm],
            };
            if let Some(dir) = &out_dir {
                fs::create_dir_all(dir)?;
            }
            for kind in kinds {
                let pairs: Vec<_> = match kind {
                    ClassifierKind::NaiveBayes => {
                        let model = train_naive_bayes(&train, vocab.clone(), alpha)?;
                        test.iter().map(|d| (d.label, model.predict(d).0)).collect()
                    }
                    ClassifierKind::Svm => {
                        let config = SvmConfig { lambda, epochs, seed };
                        let model = train_linear_svm(&train, vocab.clone(), &config)?;
                        test.iter().map(|d| (d.label, model.predict(d).0)).collect()
                    }
                };
                let report = EvalReport::from_confusion(&ConfusionMatrix::from_pairs(pairs));
                println!(
                    "== {} (train {} / test {}) ==",
                    kind.name(),
                    train.len(),
                    test.len()
                );
                println!("{}", report.render_text());
                if let Some(dir) = &out_dir {
                    let path = dir.join(format!("eval_{}.txt", kind.name()));
                    fs::write(&path, report.render_text())
                        .with_context(|| format!("cannot write {}", path.display()))?;
                    eprintln!("wrote {}", path.display());
                }
            }
        }
        Command::Evaluate {
            input,
            predictions,
            split,
            test_fraction,
            seed,
            json,
        } => {
            let docs = input.load_documents()?;
            let gold = match split {
                SplitArg::Full => docs,
                SplitArg::Test => {
                    let modeled: Vec<Document> = docs.into_iter().filter(|d| d.has_tokens()).collect();
                    split_stratified(modeled, test_fraction, seed)?.1
                }
            };
            let file = fs::File::open(&predictions)
                .with_context(|| format!("cannot read predictions {}", predictions.display()))?;
            let set = import_predictions(BufReader::new(file))?;
            let report = evaluate(&set, &gold)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                println!("{}", report.render_text());
            }
        }
        Command::Similar {
            input,
            query,
            top,
            dim,
            window,
            negatives,
            epochs,
            min_count,
            seed,
            subsample,
            save_embeddings,
        } => {
            let docs = input.load_documents()?;
            let config = SgnsConfig {
                dim,
                window,
                negatives,
                epochs,
                min_count,
                seed,
                subsample_threshold: subsample,
                ..SgnsConfig::default()
            };
            let embeddings = train_sgns(&docs, &config)?;
            if let Some(path) = &save_embeddings {
                let mut file = fs::File::create(path)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                embeddings.write_text(&mut file)?;
                eprintln!("wrote {}", path.display());
            }
            let query = query.unwrap_or_else(|| input.keyword.to_lowercase());
            println!("rank,word,cosine");
            for (i, (word, cosine)) in embeddings.most_similar(&query, top)?.iter().enumerate() {
                println!("{},{word},{cosine:.6}", i + 1);
            }
        }
        Command::Entities { input, gazetteer, output } => {
            let (records, _) = input.load_subset()?;
            let gazetteer = match &gazetteer {
                Some(path) => Gazetteer::from_path(path)?,
                None => Gazetteer::default(),
            };
            let rows = entity_frequencies(records.iter().map(|r| r.raw_text.as_str()), &gazetteer);
            let mut out = open_output(&output)?;
            writeln!(out, "surface,kind,count")?;
            for row in rows {
                writeln!(out, "{},{},{}", row.surface, row.kind.label(), row.count)?;
            }
            out.flush()?;
        }
        Command::Topics {
            input,
            topics,
            alpha,
            beta,
            iterations,
            seed,
            min_count,
            keep_stopwords,
            top,
            csv,
        } => {
            let (records, _) = input.load_subset()?;
            let opts = input.normalize_options();
            let stopwords = if keep_stopwords {
                StopwordList::none()
            } else {
                input.stopword_list()?
            };
            let token_lists: Vec<Vec<String>> = records
                .iter()
                .map(|r| tokenize_and_filter(&normalize_text_with(&r.raw_text, &opts), &stopwords))
                .collect();
            let slices: Vec<&[String]> = token_lists.iter().map(Vec::as_slice).collect();
            let vocab = Arc::new(sentrend::features::build_vocabulary_from_tokens(slices, min_count)?);
            let encoded: Vec<Vec<u32>> = token_lists
                .iter()
                .map(|ts| ts.iter().filter_map(|t| vocab.index_of(t)).map(|i| i as u32).collect())
                .collect();
            let config = LdaConfig {
                topics,
                alpha,
                beta,
                iterations,
                seed,
            };
            let model = fit_lda(encoded, vocab, &config)?;
            let table = model.top_words(top);
            if let Some(path) = &csv {
                let mut file = fs::File::create(path)
                    .with_context(|| format!("cannot write {}", path.display()))?;
                write_topics_csv(&table, &mut file)?;
                eprintln!("wrote {}", path.display());
            }
            print!("{}", render_topic_table(&table));
        }
        Command::Report {
            config,
            input,
            keyword,
            mode,
            out_dir,
            seed,
            test_fraction,
            stopwords,
            gazetteer,
            terms_corpus,
            keep_stopwords,
            skip,
        } => {
            let mut run_config: RunConfig = match &config {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("cannot read config {}", path.display()))?;
                    toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?
                }
                None => RunConfig::default(),
            };
            if let Some(v) = input {
                run_config.input = v;
            }
            if let Some(v) = keyword {
                run_config.keyword = v;
            }
            if let Some(v) = mode {
                run_config.mode = v.into();
            }
            if let Some(v) = out_dir {
                run_config.out_dir = v;
            }
            if let Some(v) = seed {
                run_config.seed = v;
                run_config.embedding.seed = v;
                run_config.lda.seed = v;
            }
            if let Some(v) = test_fraction {
                run_config.test_fraction = v;
            }
            if stopwords.is_some() {
                run_config.stopwords_path = stopwords;
            }
            if gazetteer.is_some() {
                run_config.gazetteer_path = gazetteer;
            }
            if terms_corpus {
                run_config.terms_scope = TermScope::Corpus;
            }
            if keep_stopwords {
                run_config.lda_keep_stopwords = true;
            }
            for stage in skip {
                match stage {
                    StageArg::Trends => run_config.stages.trends = false,
                    StageArg::Terms => run_config.stages.terms = false,
                    StageArg::Classify => run_config.stages.classify = false,
                    StageArg::Similarity => run_config.stages.similarity = false,
                    StageArg::Entities => run_config.stages.entities = false,
                    StageArg::Topics => run_config.stages.topics = false,
                }
            }
            if run_config.input.as_os_str().is_empty() {
                bail!("no input file given (use --input or the config file)");
            }
            let report = run_pipeline(&run_config)?;
            let manifest = emit_report(&report, &run_config.out_dir)?;
            for path in manifest {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}
