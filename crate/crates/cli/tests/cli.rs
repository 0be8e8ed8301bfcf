use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spg2ssg::examples::running_example;
use spg2ssg::io::{parse, serialize};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spg2ssg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn running(dir: &TempDir) -> PathBuf {
    write(dir, "fig1.json", &serialize(&running_example(), false))
}

/// Eve at 1 should move to the Adam vertex; a flat α = 1/2 makes the move
/// back to the random vertex look as good.
const TRANSFER_BREAKER: &str = r#"{
  "vertices": [
    {"id": 0, "owner": "random", "priority": 2},
    {"id": 1, "owner": "eve", "priority": 1},
    {"id": 2, "owner": "adam", "priority": 0}
  ],
  "edges": [
    {"from": 0, "to": 0, "prob": "1/2"},
    {"from": 0, "to": 1, "prob": "1/2"},
    {"from": 1, "to": 0},
    {"from": 1, "to": 2},
    {"from": 2, "to": 0},
    {"from": 2, "to": 1}
  ],
  "objective": {"type": "parity"}
}"#;

#[test]
fn bounds_on_running_example() {
    let dir = TempDir::new().unwrap();
    let o = run(&["bounds", s(&running(&dir))]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("n = 6"), "{out}");
    assert!(out.contains("M = 10"), "{out}");
    assert!(out.contains("delta_min = 1/10 (~0.1)"), "{out}");
    let eps = format!("epsilon = 1/{}", 518_400u64);
    assert!(out.contains(&eps), "{out}");
    assert!(out.contains(&format!("{}{}", 518_400u64, "0".repeat(72))), "{out}");
}

#[test]
fn validate_reports_violations() {
    let dir = TempDir::new().unwrap();
    assert!(run(&["validate", s(&running(&dir))]).status.success());
    let bad = write(
        &dir,
        "bad.json",
        r#"{"vertices": [{"id": 0, "owner": "random", "priority": 0}],
            "edges": [{"from": 0, "to": 0, "prob": "1/2"}],
            "objective": {"type": "parity"}}"#,
    );
    let o = run(&["validate", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/2"));
}

#[test]
fn parse_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let broken = write(&dir, "broken.json", "{\"vertices\": [");
    assert_eq!(run(&["validate", s(&broken)]).status.code(), Some(2));
    let float = write(
        &dir,
        "float.json",
        r#"{"vertices": [{"id": 0, "owner": "random"}, {"id": 1, "owner": "random"}],
            "edges": [{"from": 0, "to": 1, "prob": 0.5}, {"from": 0, "to": 0, "prob": "1/2"},
                      {"from": 1, "to": 1, "prob": "1"}],
            "objective": {"type": "reachability", "target": [1]}}"#,
    );
    assert_eq!(run(&["solve", s(&float)]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn reduce_writes_the_gadget_game() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("red.json");
    let o = run(&["reduce", s(&running(&dir)), "--out", s(&out)]);
    assert!(o.status.success());
    let red = parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(red.arena.num_vertices(), 14);
    assert_eq!(red.arena.num_edges(), 27);
    // α_5 = 1/65537^6 stays an exact fraction
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains("e-") && !text.contains("e+"));
}

#[test]
fn solve_methods_agree() {
    let dir = TempDir::new().unwrap();
    let f = running(&dir);
    let oracle = run(&["solve", s(&f), "--method", "oracle"]);
    assert!(oracle.status.success());
    let out = stdout(&oracle);
    assert!(out.contains("Eve strategy: [3->2]"), "{out}");
    assert!(out.contains("v5: 1 (~1)"), "{out}");

    let si = run(&["solve", s(&f), "--method", "si", "--alpha", s(&write(&dir, "a.json", r#"{"first": "1/4", "ratio": "1/2"}"#))]);
    assert!(si.status.success(), "{}", String::from_utf8_lossy(&si.stderr));
    assert!(stdout(&si).contains("values:"));

    let vi = run(&["solve", s(&f), "--method", "vi", "--max-iters", "10"]);
    assert!(String::from_utf8_lossy(&vi.stderr).contains("warning"));
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let o = run(&["verify", s(&running(&dir))]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("transfer holds"));

    let g = write(&dir, "breaker.json", TRANSFER_BREAKER);
    assert!(run(&["verify", s(&g)]).status.success());
    let flat = write(&dir, "flat.json", r#"["1/2", "1/2", "1/2", "1/2"]"#);
    let o = run(&["verify", s(&g), "--alpha", s(&flat)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("transfer fails"));
}

#[test]
fn separation_and_worst_case() {
    let dir = TempDir::new().unwrap();
    let o = run(&["separation", s(&running(&dir))]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("separation holds"));

    let out = dir.path().join("wc.json");
    let o = run(&["worst-case", "--m", "3", "--s", "1/4", "--alpha", "1/8", "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("equal"));
    assert_eq!(parse(&std::fs::read_to_string(&out).unwrap()).unwrap().arena.num_vertices(), 6);
    let o = run(&["worst-case", "--m", "3", "--s", "3/4", "--alpha", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dot_export_is_stable() {
    let dir = TempDir::new().unwrap();
    let f = running(&dir);
    let a = stdout(&run(&["export-dot", s(&f)]));
    let b = stdout(&run(&["export-dot", s(&f)]));
    assert_eq!(a, b);
    assert!(a.contains("shape=box") && a.contains("shape=pentagon") && a.contains("shape=circle"));
}

#[test]
fn solve_single_strategy_game() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "one.json",
        r#"{"vertices": [{"id": 0, "owner": "random"}, {"id": 1, "owner": "random"},
                         {"id": 2, "owner": "random"}],
            "edges": [{"from": 0, "to": 1, "prob": "1/3"}, {"from": 0, "to": 2, "prob": "2/3"},
                      {"from": 1, "to": 1, "prob": "1"}, {"from": 2, "to": 2, "prob": "1"}],
            "objective": {"type": "reachability", "target": [1]}}"#,
    );
    let o = run(&["solve", s(&f), "--method", "oracle"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("0: 1/3 (~0.333333333333)"), "{out}");
    assert!(out.contains("2: 0 (~0)"), "{out}");
}
