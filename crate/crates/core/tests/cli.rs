mod common;

use cafelite::cli;
use common::corpus;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut all = vec!["cafelite"];
    all.extend_from_slice(args);
    let code = cli::run(all, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn c(rel: &str) -> String {
    corpus(rel).display().to_string()
}

#[test]
fn check_runs_corpus_expectations() {
    let (code, out, _) = run(&["check", &c("intro/signal.cafe"), &c("intro/label.cafe"), "--path", &c("intro"), "--run"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("0 failed"));
}

#[test]
fn check_reports_parse_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = common::write_temp(dir.path(), "bad.cafe", "mod! BAD { op f : -> }\n");
    let (code, _, err) = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(code, cli::ERROR);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn reduce_with_prelude_and_expectation() {
    let sim = c("multi/simulation.cafe");
    let (code, out, _) = run(&["reduce", "MS", "pos(p2, st(5))", "--file", &sim, "--expect", "10"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("10\n"));
    let (code, _, _) = run(&["reduce", "MS", "pos(p2, st(5))", "--file", &sim, "--expect", "11"]);
    assert_eq!(code, cli::FAILED);
    let (code, out, _) = run(&["reduce", "MS", "pos(p2, st(5))", "--file", &sim, "--budget", "5"]);
    assert_eq!(code, cli::FAILED);
    assert!(out.contains("exhausted"));
}

#[test]
fn prove_exit_codes() {
    let (code, out, _) = run(&["prove", &c("proof/invariants.yaml")]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS"));
    let (code, out, _) = run(&["prove", &c("proof/passages.yaml"), "--format", "json"]);
    assert_eq!(code, cli::FAILED);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["expectations_met"], true);
}

#[test]
fn simulate_prints_table() {
    let (code, out, _) = run(&["simulate", "--trace", &c("traces/two_cars.trace")]);
    assert_eq!(code, 0);
    let last = out.lines().last().unwrap();
    assert!(last.contains("tick 3") && last.contains("13") && last.contains("10"), "{last}");
}

#[test]
fn search_finds_witness_for_short_interval() {
    let (code, out, _) = run(&["search", "--params", "5,10,2", "--depth", "6"]);
    assert_eq!(code, cli::FAILED);
    assert!(out.contains("does not hold"));
    assert!(out.contains("witness for inv1"));
    let (code, out, _) = run(&["search", "--depth", "6", "--cars", "a,b"]);
    assert_eq!(code, 0);
    assert!(out.ends_with("0 violations\n"));
}

#[test]
fn compare_reports_seed() {
    let (code, out, _) = run(&["compare", "--seed", "3", "--count", "20", "--path", &c("multi")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("seed 3\n"));
    assert!(out.ends_with("0 mismatches\n"));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"]).0, cli::ERROR);
    assert_eq!(run(&["search", "--params", "1,2"]).0, cli::ERROR);
    assert_eq!(run(&["--help"]).0, 0);
}
