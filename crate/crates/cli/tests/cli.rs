use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chainpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chainpart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn value_prints_one_row_per_width() {
    let out = chainpart(&["value", "--w", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "1\t1\n2\t3\n3\t4\n");
}

#[test]
fn value_rejects_zero_width() {
    let out = chainpart(&["value", "--w", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--w"), "{}", stderr(&out));
}

#[test]
fn play_reaches_the_golden_value() {
    let out = chainpart(&["play", "--w", "5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "chains=8 bound=8");
}

#[test]
fn general_doubler_forces_first_fit_to_three_chains() {
    let out = chainpart(&[
        "play",
        "--mode",
        "general",
        "--w",
        "2",
        "--spoiler",
        "doubler",
        "--algorithm",
        "first-fit",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "chains=3 bound=3");
}

#[test]
fn unknown_algorithm_is_a_usage_error() {
    let out = chainpart(&["play", "--w", "3", "--algorithm", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("UnknownStrategy"), "{}", stderr(&out));
}

#[test]
fn sweep_stays_on_the_bound() {
    let out = chainpart(&["sweep", "--w", "10", "--algorithm", "alg,first_fit"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 20);
    assert!(rows.iter().all(|r| r.ends_with("\tyes")));
}

fn write_game(dir: &Path, w: &str) -> std::path::PathBuf {
    let path = dir.join("game.json");
    let out = chainpart(&["play", "--w", w, "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    path
}

#[test]
fn verify_accepts_a_played_game() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_game(dir.path(), "4");
    let out = chainpart(&["verify", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let verdict: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(verdict["ok"], true);
    assert_eq!(verdict["chains_used"], 6);
}

#[test]
fn verify_names_the_fault_in_a_tampered_game() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_game(dir.path(), "2");
    let mut t: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    // Points 0 and 1 are incomparable, so 1 cannot join 0's chain.
    assert_eq!(t["events"][3]["assign"]["id"], 1);
    t["events"][3]["assign"]["chain"] = 0.into();
    std::fs::write(&path, t.to_string()).unwrap();

    let out = chainpart(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("fault at event 3: invalid_chain"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn verify_reports_unreadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.json");
    std::fs::write(&path, "not json").unwrap();
    let out = chainpart(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("not a transcript"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn prooflab_passes_on_a_golden_game() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_game(dir.path(), "6");
    let out = chainpart(&["prooflab", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}{}", stdout(&out), stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["chains_used"], 9);
}

#[test]
fn adversary_finds_the_game_value() {
    let out = chainpart(&["adversary", "--w", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn adversary_budget_has_its_own_exit_code() {
    let out = chainpart(&["adversary", "--w", "5", "--node-cap", "10"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}
