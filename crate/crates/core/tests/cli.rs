//! End-to-end checks of the command-line surface via the built binary.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::synthetic_csv;

fn sentrend(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sentrend"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_corpus(dir: &Path, rows: usize) -> String {
    let path = dir.join("corpus.csv");
    fs::write(&path, synthetic_csv(rows)).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn report_writes_manifest_files() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path(), 300);
    let out = sentrend(
        &[
            "report",
            "--input",
            &input,
            "--keyword",
            "car",
            "--out-dir",
            "analysis",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let manifest: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    assert!(!manifest.is_empty());
    for line in &manifest {
        assert!(dir.path().join(line).exists(), "{line} missing");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("analysis/report.json")).unwrap()).unwrap();
    for key in ["corpus", "sentiment", "trends", "terms", "similar", "entities", "topics", "evaluations"] {
        assert!(report.get(key).is_some(), "report.json missing {key}");
    }
    assert_eq!(report["sentiment"]["status"], "ok");
}

#[test]
fn report_honors_config_file_and_skips() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path(), 200);
    let config = format!(
        "input = {input:?}\nkeyword = \"car\"\nout_dir = \"from_config\"\n\n[embedding]\ndim = 8\nepochs = 1\nmin_count = 2\n\n[lda]\niterations = 30\n"
    );
    fs::write(dir.path().join("run.toml"), config).unwrap();
    let out = sentrend(
        &["report", "--config", "run.toml", "--skip", "topics", "--skip", "classify"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("from_config/report.json")).unwrap()).unwrap();
    assert_eq!(report["topics"]["status"], "skipped");
    assert_eq!(report["evaluations"]["status"], "skipped");
    assert_eq!(report["trends"]["status"], "ok");
    assert!(!dir.path().join("from_config/topics.csv").exists());
}

#[test]
fn filter_emits_matching_rows_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path(), 120);
    let out = sentrend(&["filter", "--input", &input, "--keyword", "car"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.is_empty());
    for line in text.lines() {
        assert!(line.to_lowercase().contains("car"), "non-matching row: {line}");
    }
    let stats: serde_json::Value = serde_json::from_str(
        String::from_utf8_lossy(&out.stderr).lines().last().unwrap(),
    )
    .unwrap();
    assert_eq!(stats["rows_read"], 120);
    assert_eq!(stats["matched"], text.lines().count());
}

#[test]
fn train_prints_classification_reports() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path(), 300);
    let out = sentrend(
        &["train", "--input", &input, "--keyword", "car", "--model", "nb"],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("precision"));
    assert!(text.contains("negative"));
    assert!(text.contains("weighted avg"));
}

#[test]
fn terms_topics_similar_and_entities_have_expected_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path(), 250);

    let out = sentrend(
        &["terms", "--input", &input, "--keyword", "car", "-n", "5"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("rank,word,score"));
    assert!(text.lines().count() <= 6);

    let out = sentrend(
        &[
            "topics", "--input", &input, "--keyword", "car",
            "--iterations", "40", "--min-count", "2", "-n", "4",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("Topic"));

    let out = sentrend(
        &[
            "similar", "--input", &input, "--keyword", "car",
            "--dim", "8", "--epochs", "2", "--min-count", "2", "-n", "3",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("rank,word,cosine"));

    let out = sentrend(&["entities", "--input", &input, "--keyword", "car"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("surface,kind,count"));
    assert!(text.contains("car,product"));
}

#[test]
fn evaluate_scores_imported_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_corpus(dir.path(), 150);

    // build a perfect prediction file from the gold labels
    let file = fs::File::open(&input).unwrap();
    let (records, _) = sentrend::corpus::parse_sentiment140(std::io::BufReader::new(file)).unwrap();
    let filter = sentrend::corpus::KeywordFilter::new("car", sentrend::corpus::MatchMode::Substring).unwrap();
    let mut preds = String::new();
    for r in records.iter().filter(|r| filter.matches(&r.raw_text)) {
        preds.push_str(&format!("{},{}\n", r.tweet_id, r.label.code()));
    }
    fs::write(dir.path().join("preds.csv"), preds).unwrap();

    let out = sentrend(
        &[
            "evaluate", "--input", &input, "--keyword", "car",
            "--predictions", "preds.csv", "--json",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["accuracy"], 1.0);
}

#[test]
fn failures_print_machine_readable_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = sentrend(
        &["report", "--input", "missing.csv", "--keyword", "car", "--out-dir", "x"],
        dir.path(),
    );
    assert!(!out.status.success());
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().last().unwrap()).unwrap();
    assert!(err["error"].as_str().unwrap().contains("missing.csv"));

    let input = write_corpus(dir.path(), 60);
    let out = sentrend(
        &["filter", "--input", &input, "--keyword", "zeppelin"],
        dir.path(),
    );
    assert!(!out.status.success());
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().last().unwrap()).unwrap();
    assert!(err["error"].as_str().unwrap().contains("zeppelin"));
}
