mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use common::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liftattr"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin().args(args).stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn assert_error(o: &Output, code: i32) {
    assert_eq!(o.status.code(), Some(code), "{}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("ERROR[{code}]: ")), "{err}");
}

#[test]
fn banzhaf_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let movies = data("movies.json");
    let o = run(&["banzhaf", "-i", movies.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out).unwrap();
    assert!(csv.contains("\nm3,24,"));
    assert!(csv.contains("\nd1,20,"));
}

#[test]
fn no_lift_gives_the_same_values() {
    let movies = data("movies.json");
    let a = run(&["shapley", "-i", movies.to_str().unwrap(), "--all"]);
    let b = run(&["shapley", "-i", movies.to_str().unwrap(), "--all", "--no-lift"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn generated_instance_oracle_agrees() {
    let gen = run(&["gen", "--vars", "8", "--clauses", "6", "--width", "3", "--seed", "1"]);
    assert!(gen.status.success());
    let text = stdout(&gen);
    let oracle = run_stdin(&["banzhaf", "--method", "oracle", "--all"], &text);
    let gradient = run_stdin(&["banzhaf", "--method", "gradient", "--all"], &text);
    assert!(oracle.status.success() && gradient.status.success(), "{}", stderr(&gradient));
    assert_eq!(stdout(&oracle), stdout(&gradient));
}

#[test]
fn max_lineage_methods() {
    let p = data("movies_max.json");
    let outs: Vec<String> = ["gradient", "counts", "oracle"]
        .iter()
        .map(|m| {
            let o = run(&["banzhaf", "-i", p.to_str().unwrap(), "--method", m, "--format", "json"]);
            assert!(o.status.success(), "{}", stderr(&o));
            let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
            v["banzhaf"].to_string()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[0], outs[2]);
    assert!(outs[0].contains("\"m3\":\"11976\""), "{}", outs[0]);
}

#[test]
fn compile_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("t.dot");
    let movies = data("movies.json");
    let o = run(&["compile", "-i", movies.to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "and(or(d1,d2),shannon(or(a1,a3),or(m2,m3),and(a2,m3)))");
    assert!(std::fs::read_to_string(dot).unwrap().contains("p=0.46875"));
    let s = run(&["compile", "-i", movies.to_str().unwrap(), "--stats"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&s)).unwrap();
    assert_eq!(v["size"], 14);
}

#[test]
fn oracle_subcommand() {
    let o = run_stdin(&["oracle"], "x\ny\n");
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"]["model_count"], 3);
    assert_eq!(v["shapley"]["x"], "0.5");
}

#[test]
fn input_errors_exit_2() {
    let movies = data("movies.json");
    assert_error(&run(&["banzhaf", "-i", movies.to_str().unwrap(), "--method", "counts"]), 2);
    assert_error(&run(&["banzhaf", "-i", "/nonexistent/file.json"]), 2);
    assert_error(&run_stdin(&["banzhaf"], "{\"type\":\"dnf\",\n\"clauses\":[[]]}"), 2);
    assert_error(&run(&["gen", "--vars", "2", "--width", "3"]), 2);
    assert_error(&run(&["banzhaf", "--format", "xml"]), 2);
    assert_error(&run(&["frobnicate"]), 2);
    let sum = run_stdin(&["compile"], r#"{"type":"aggregate","monoid":"sum","terms":[{"clauses":[["x"]],"value":"2"}]}"#);
    assert_error(&sum, 2);
    let dir = tempfile::tempdir().unwrap();
    assert_error(&run(&["bench", "--dir", dir.path().to_str().unwrap()]), 2);
}

#[test]
fn oracle_cap_is_an_input_error() {
    let clause: Vec<String> = (0..30).map(|i| format!("v{i}")).collect();
    let o = run_stdin(&["oracle"], &clause.join(" "));
    assert_error(&o, 2);
}

#[test]
fn gen_corpus_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c");
    let o = run(&["gen", "--dup", "2", "--count", "5", "--dir", corpus.to_str().unwrap(), "--seed", "10"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(corpus.join("gen_00004.json").exists());
    let out = dir.path().join("bench.csv");
    let b = bin()
        .args(["bench", "--dir", corpus.to_str().unwrap(), "-o", out.to_str().unwrap()])
        .env("ATTR_JOBS", "2")
        .output()
        .unwrap();
    assert!(b.status.success(), "{}", stderr(&b));
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("gen_")).count(), 5);
    assert!(csv.contains("summary:p99,"));
    assert!(csv.trim_end().ends_with("1.0000"));
}

#[test]
fn same_seed_same_bytes() {
    let a = run(&["gen", "--seed", "42", "--monoid", "max", "--values", "1..9"]);
    let b = run(&["gen", "--seed", "42", "--monoid", "max", "--values", "1..9"]);
    assert_eq!(a.stdout, b.stdout);
}
