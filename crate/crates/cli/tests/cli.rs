use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use slantrel::fixtures;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_slantrel"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn put(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn solve_w1_emits_rel_and_layout() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "w1.json", &fixtures::w1().to_json());
    let rel = dir.path().join("rel.json");
    let svg = dir.path().join("w1.svg");
    let trace = dir.path().join("trace.jsonl");
    let o = run(&["solve", s(&g), "--emit-rel", s(&rel), "--emit-layout", s(&svg), "--trace", s(&trace)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["has_slant"], true);
    assert!(v["layout"]["rects"].is_array());
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let lines = std::fs::read_to_string(&trace).unwrap();
    assert!(lines.lines().all(|l| serde_json::from_str::<Value>(l).is_ok()));
    assert!(!lines.is_empty());

    let check = run(&["check-rel", s(&g), s(&rel)]);
    assert_eq!(check.status.code(), Some(0));
    let v = stdout_json(&check);
    assert_eq!(v["valid"], true);
    assert_eq!(v["slant"], true);
}

#[test]
fn solve_negative_fixture_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "neg.json", &fixtures::no_slant().to_json());
    let o = run(&["solve", s(&g)]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["has_slant"], false);
}

#[test]
fn malformed_graph_exits_2_with_json_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "bad.json", "{\"vertices\": [");
    let o = run(&["validate", s(&g)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    for line in err.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["level"], "error");
    }
}

#[test]
fn validate_fixture_passes() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "p5.json", &fixtures::p5().to_json());
    let o = run(&["validate", s(&g)]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["solve", "/nonexistent/graph.json"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn gadgets_dump_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "h2.json", &fixtures::h2().to_json());
    let o = run(&["gadgets", s(&g)]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let n = slantrel::gadget::enumerate_gadgets(&fixtures::h2()).len();
    assert_eq!(v.as_array().unwrap().len(), n);
    for gad in v.as_array().unwrap() {
        for field in ["kind", "low", "mid", "high", "alpha", "beta", "gamma"] {
            assert!(!gad[field].is_null(), "missing {field}");
        }
    }
}

#[test]
fn oracle_lists_every_rel() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "p5.json", &fixtures::p5().to_json());
    let list = dir.path().join("rels.jsonl");
    let o = run(&["oracle", s(&g), "--list-rels", s(&list)]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let lines = std::fs::read_to_string(&list).unwrap().lines().count();
    assert_eq!(v["rels"].as_u64().unwrap() as usize, lines);
    assert!(v["slant_rels"].as_u64().unwrap() >= 1);
}

#[test]
fn gen_is_deterministic() {
    let a = run(&["gen", "--n", "6", "--seed", "42"]);
    let b = run(&["gen", "--n", "6", "--seed", "42"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gen", "--n", "6", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn layout_and_cartogram() {
    let dir = tempfile::tempdir().unwrap();
    let g = put(dir.path(), "w1.json", &fixtures::w1().to_json());
    let rel = put(dir.path(), "rel.json", &fixtures::w1_rel().to_json());
    let svg = dir.path().join("out.svg");
    let o = run(&["layout", s(&g), s(&rel), "--svg", s(&svg), "--width", "200", "--height", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout_json(&o)["bounds"].is_array());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains("width=\"200\""), "{text}");

    let n = fixtures::w1().vertex_count();
    let mut areas = vec![1.0; n];
    areas[0] = 4.0;
    let a = put(dir.path(), "areas.json", &serde_json::to_string(&areas).unwrap());
    let o = run(&["cartogram", s(&g), s(&rel), s(&a)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout_json(&o)["residual"].as_f64().unwrap() <= 1e-6);

    let bad = put(dir.path(), "bad_areas.json", "[1.0, -2.0]");
    assert_eq!(run(&["cartogram", s(&g), s(&rel), s(&bad)]).status.code(), Some(2));
}

#[test]
fn sweep_agrees_and_ignores_job_count() {
    let one = run(&["sweep", "--count", "12", "--max-n", "4"]);
    let two = run(&["sweep", "--count", "12", "--max-n", "4", "--jobs", "3"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(stdout_json(&one)["disagreements"], 0);
}
