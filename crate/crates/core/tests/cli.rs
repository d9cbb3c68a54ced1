mod common;

use std::process::{Command, Output};

fn divsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn micro(name: &str) -> String {
    common::fixture_dir("micro").join(name).display().to_string()
}

#[test]
fn solve_writes_a_plan_file_and_render_plays_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plans.json");
    let o = divsim(&[
        "solve", "--instance", &micro("pzl-swap.pzl"), "--k", "2", "--cost-bound", "8",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let file: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file["plans"].as_array().unwrap().len(), 2);

    let o = divsim(&[
        "render", "--instance", &micro("pzl-swap.pzl"), "--plan", out.to_str().unwrap(), "--index", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("final score"));

    let o = divsim(&[
        "render", "--instance", &micro("pzl-swap.pzl"), "--plan", out.to_str().unwrap(), "--index", "9",
    ]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn unsolvable_budget_and_bad_input_exit_codes() {
    // Cost bound too small to reach the far target.
    let o = divsim(&["solve", "--instance", &micro("grid-line.grid"), "--cost-bound", "1"]);
    assert_eq!(o.status.code(), Some(2));

    let o = divsim(&["solve", "--instance", &micro("grid-three.grid"), "--k", "50", "--node-limit", "5"]);
    assert_eq!(o.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.grid");
    std::fs::write(&bad, "S.X\n").unwrap();
    let o = divsim(&["solve", "--instance", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(65));

    let o = divsim(&["solve", "--instance", &micro("grid-line.grid"), "--mode", "nope"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn oracle_lists_behaviours() {
    let o = divsim(&["oracle", "--instance", &micro("grid-open3.grid"), "--max-len", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 2);
}

#[test]
fn bench_writes_both_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let suite = dir.path().join("suite");
    std::fs::create_dir(&suite).unwrap();
    for name in ["grid-open3.grid", "grid-room.grid"] {
        std::fs::copy(micro(name), suite.join(name)).unwrap();
    }
    let out = dir.path().join("results.csv");
    let o = divsim(&[
        "bench", "--suite", suite.to_str().unwrap(), "--k-list", "2,3", "--cost-bound", "8",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = std::fs::read_to_string(&out).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 2 * 2);
    assert!(dir.path().join("results.summary.csv").exists());
}
