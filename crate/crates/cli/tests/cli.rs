use std::path::PathBuf;
use std::process::{Command, Output};

use logquest_cli::builtin_asset_root;

fn logquest(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logquest"))
        .args(args)
        .env_remove("LOGQUEST_CONFIG")
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("logquest-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn ask_prints_answers() {
    let o = logquest(&["ask", "What is the capital of Germany?"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let answers: Vec<&str> = out
        .lines()
        .filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit()))
        .collect();
    assert!((1..=3).contains(&answers.len()), "{out}");
    assert!(answers[0].starts_with("1. Berlin"), "{out}");
    assert!(out.contains("[Berlin] is the capital of [Germany]"), "{out}");
}

#[test]
fn ask_json() {
    let o = logquest(&["ask", "--json", "Who wrote Faust?"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["answers"][0]["answer_text"].as_str().unwrap().contains("Goethe"));
}

#[test]
fn unparseable_question_is_user_error() {
    let o = logquest(&["ask", "Colorless green ideas sleep furiously"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("question not understood"));
}

#[test]
fn flag_errors() {
    let o = logquest(&["--no-such-flag", "ask", "x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Usage"));
    assert_eq!(logquest(&[]).status.code(), Some(1));
    assert_eq!(logquest(&["--help"]).status.code(), Some(0));
    let o = logquest(&["--max-relax", "lots", "ask", "What is the capital of Germany?"]);
    assert_eq!(o.status.code(), Some(1));
    let o = logquest(&["--answers-returned", "0", "ask", "What is the capital of Germany?"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(logquest(&["serve", "--bind", "not-an-address"]).status.code(), Some(1));
    let o = logquest(&["--assets", "/nonexistent", "ask", "What is the capital of Germany?"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_and_env() {
    let cfg = scratch("one.conf");
    std::fs::write(&cfg, "answers_returned = 1\n").unwrap();
    let o = logquest(&[
        "--config",
        cfg.to_str().unwrap(),
        "ask",
        "--json",
        "Which river flows through Koblenz?",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["answers"].as_array().unwrap().len(), 1);

    let o = Command::new(env!("CARGO_BIN_EXE_logquest"))
        .args(["ask", "--json", "Which river flows through Koblenz?"])
        .env("LOGQUEST_CONFIG", &cfg)
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["answers"].as_array().unwrap().len(), 1);

    let bad = scratch("bad.conf");
    std::fs::write(&bad, "answers = 1\n").unwrap();
    let o = logquest(&["--config", bad.to_str().unwrap(), "ask", "x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown key"));
}

#[test]
fn check_kb_reports_lines() {
    let kb = builtin_asset_root().join("kb/background.lkb");
    let o = logquest(&["check-kb", kb.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("0 syntax errors"));

    let bad = scratch("bad.lkb");
    std::fs::write(&bad, "p(a).\n% fine\nq(X) :- p(X\nr(X).\n").unwrap();
    let o = logquest(&["check-kb", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.lkb:3:"), "{}", stderr(&o));
    assert!(stdout(&o).contains("bad.lkb:4: not range restricted"), "{}", stdout(&o));

    let reserved = scratch("reserved.lkb");
    std::fs::write(&reserved, "dom(a).\n").unwrap();
    assert_eq!(
        logquest(&["check-kb", reserved.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(logquest(&["check-kb", "/nonexistent.lkb"]).status.code(), Some(1));
}

#[test]
fn train_round_trip() {
    let data = builtin_asset_root().join("train/separable.csv");
    let out = scratch("sep.lrm");
    let o = logquest(&[
        "train",
        "--model-kind",
        "passage",
        "--data",
        data.to_str().unwrap(),
        "--lr",
        "0.1",
        "--epochs",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let model = logquest::ranker::LinearModel::load(&out).unwrap();
    assert_eq!(model.kind(), logquest::ranker::ModelKind::Passage);

    let o = logquest(&[
        "train",
        "--model-kind",
        "answer",
        "--data",
        data.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "answer schema also has five columns");
    let o = logquest(&["train", "--model-kind", "bogus", "--data", "x", "--out", "y"]);
    assert_eq!(o.status.code(), Some(1));
    let o = logquest(&[
        "train",
        "--model-kind",
        "passage",
        "--data",
        data.to_str().unwrap(),
        "--lr",
        "-1",
        "--out",
        "y",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_reports_accuracy() {
    let o = logquest(&["bench", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["questions"].as_u64().unwrap() >= 25);
    assert!(v["accuracy"].as_f64().unwrap() >= 0.9);
    let o = logquest(&["bench"]);
    assert!(stdout(&o).contains("accuracy@3:"));
    assert!(stdout(&o).contains("latency p99:"));
}

#[test]
fn dump_features_writes_csv() {
    let o = logquest(&["dump-features", "--model-kind", "passage"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("matching_lexeme_count,"));
    assert!(out.lines().count() > 30);
}
