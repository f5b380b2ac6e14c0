//! End-to-end tests of the binary: exit codes, determinism of reports, and
//! corpus round trips.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ih")
}

fn workspace_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn compute_on_circle() {
    let out = Command::new(bin())
        .args([
            "compute",
            "--complex",
            workspace_corpus().join("circle.json").to_str().unwrap(),
            "--perversity",
            "zero",
            "--notion",
            "poly",
            "--level",
            "0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("degree"));
    assert!(stdout.contains("1"), "betti table expected");
}

#[test]
fn malformed_rational_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(workspace_corpus().join("circle.json")).unwrap();
    let bad = text.replace("\"0/1\"", "\"3/0\"");
    let path = dir.path().join("bad.json");
    std::fs::write(&path, bad).unwrap();
    let out = Command::new(bin())
        .args([
            "compute",
            "--complex",
            path.to_str().unwrap(),
            "--perversity",
            "zero",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_stratum_exits_3() {
    let out = Command::new(bin())
        .args([
            "compute",
            "--complex",
            workspace_corpus().join("pinched_disk.json").to_str().unwrap(),
            "--perversity",
            "sd9.NOPE:1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_deterministic_modulo_timing() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("report{i}.jsonl"));
        let out = Command::new(bin())
            .args([
                "compute",
                "--complex",
                workspace_corpus().join("pinched_disk.json").to_str().unwrap(),
                "--perversity",
                "top",
                "--notion",
                "gm",
                "--level",
                "1",
                "--seed",
                "99",
                "--report",
                path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(out.status.success());
        let text = std::fs::read_to_string(&path).unwrap();
        let filtered: Vec<&str> = text
            .lines()
            .filter(|l| !l.contains("\"record\":\"timing\""))
            .collect();
        reports.push(filtered.join("\n"));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn corpus_documents_are_canonical() {
    // every bundled document parses and equals its own canonical form
    for entry in std::fs::read_dir(workspace_corpus()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().map_or(true, |e| e != "json") {
            continue;
        }
        let out = Command::new(bin())
            .args([
                "compute",
                "--complex",
                path.to_str().unwrap(),
                "--perversity",
                "zero",
                "--level",
                "0",
            ])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{path:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn check_cone_suite_on_small_corpus() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["circle.json", "simplex2.json"] {
        std::fs::copy(workspace_corpus().join(name), dir.path().join(name)).unwrap();
    }
    let report = dir.path().join("report.jsonl");
    let out = Command::new(bin())
        .args([
            "check",
            "cone",
            "--corpus",
            dir.path().to_str().unwrap(),
            "--seed",
            "7",
            "--report",
            report.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("\"record\":\"summary\""));
    assert!(!text.contains("\"status\":\"fail\""));
}

#[test]
fn unknown_suite_is_an_error() {
    let out = Command::new(bin())
        .args(["check", "nonsense", "--corpus", workspace_corpus().to_str().unwrap()])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
