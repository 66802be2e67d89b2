use std::path::Path;
use std::process::{Command, Output};

fn ehrq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ehrq")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let o = ehrq(dir, args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

const STORE: [&str; 4] = ["--manifest", "fx/manifest.json", "--data", "fx"];

fn with_store<'a>(args: &[&'a str]) -> Vec<&'a str> {
    args.iter().copied().chain(STORE).collect()
}

#[test]
fn full_pipeline_on_a_generated_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["gen-fixture", "--out", "fx", "--patients", "30", "--seed", "7"]);
    assert!(dir.join("fx/patients.csv").exists());

    let metrics: serde_json::Value = serde_json::from_str(&ok(dir, &with_store(&["build-kg", "--out", "kg.tsv"]))).unwrap();
    assert_eq!(metrics["max_depth"], 5);
    let lines = std::fs::read_to_string(dir.join("kg.tsv")).unwrap().lines().count();
    assert_eq!(metrics["triple_count"].as_u64().unwrap() as usize, lines);

    ok(dir, &with_store(&["sample-corpus", "--templates", "fx/templates.json", "--n", "200", "--out", "corpus.jsonl"]));
    let out = ok(dir, &with_store(&["verify-equivalence", "--corpus", "corpus.jsonl", "--report", "eq.json"]));
    assert!(out.contains("match_rate 1.000"), "{out}");

    let first: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(dir.join("corpus.jsonl")).unwrap().lines().next().unwrap()).unwrap();
    let sql = first["sql"].as_str().unwrap();
    let sparql = first["sparql"].as_str().unwrap();
    let a: serde_json::Value = serde_json::from_str(&ok(dir, &with_store(&["run-sql", "--query", sql]))).unwrap();
    let b: serde_json::Value = serde_json::from_str(&ok(dir, &with_store(&["run-sparql", "--query", sparql]))).unwrap();
    assert_eq!(a["rows"], b["rows"]);

    let pred = serde_json::json!({"gold": sql, "pred": sql}).to_string();
    std::fs::write(dir.join("pred.jsonl"), format!("{pred}\n")).unwrap();
    let report: serde_json::Value =
        serde_json::from_str(&ok(dir, &with_store(&["evaluate", "--pred", "pred.jsonl", "--lang", "sql"]))).unwrap();
    assert_eq!(report["acc_lf"], 1.0);
    assert_eq!(report["acc_ex"], 1.0);

    ok(dir, &["stats", "--dataset", "corpus.jsonl", "--out", "stats"]);
    assert!(dir.join("stats/summary.json").exists());
    assert!(dir.join("stats/joins.dat").exists());
}

#[test]
fn transpile_prints_sparql() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["gen-fixture", "--out", "fx", "--patients", "2"]);
    let out = ok(
        dir,
        &["transpile", "--manifest", "fx/manifest.json", "--sql", "select patients.name from patients where patients.gender = \"f\""],
    );
    assert_eq!(out.trim(), "select ?name where { ?subject_id </gender> \"f\" . ?subject_id </name> ?name . }");
}

#[test]
fn renormalize_five_to_nine() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["gen-fixture", "--out", "five", "--patients", "5", "--schema", "five_table"]);
    ok(dir, &["gen-fixture", "--out", "nine", "--patients", "5"]);
    let out = ok(
        dir,
        &[
            "renormalize",
            "--source-manifest",
            "five/manifest.json",
            "--target-manifest",
            "nine/manifest.json",
            "--mapping",
            "five/mapping_to_nine.json",
            "--sql",
            "select demographic.name from demographic where demographic.age > 40",
        ],
    );
    assert!(out.contains("patients") && out.contains("admissions"), "{out}");
}

#[test]
fn failures_exit_with_one_and_usage_errors_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["gen-fixture", "--out", "fx", "--patients", "3"]);

    let bad_query = ehrq(dir, &with_store(&["run-sql", "--query", "select nope"]));
    assert_eq!(bad_query.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_query.stderr).contains("error"));

    let missing = ehrq(dir, &["build-kg", "--manifest", "fx/manifest.json", "--data", "nowhere"]);
    assert_eq!(missing.status.code(), Some(1));

    std::fs::write(dir.join("pred.jsonl"), "{\"gold\": 1}\n").unwrap();
    let malformed = ehrq(dir, &with_store(&["evaluate", "--pred", "pred.jsonl", "--lang", "sql"]));
    assert_eq!(malformed.status.code(), Some(1));

    assert_eq!(ehrq(dir, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(ehrq(dir, &["gen-fixture"]).status.code(), Some(2));
}
