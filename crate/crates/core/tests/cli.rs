//! End-to-end runs of the `qwjoin` binary.

use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

fn qwjoin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwjoin")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_prints_a_report() {
    let out = qwjoin(&["analyze", "--family", "CP", "6", "--matrix", "L", "--pair", "0", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pst"]["pst"], false);
    assert_eq!(v["order"], 6);
    assert!(v["partition"].is_object());
}

#[test]
fn analyze_with_a_right_operand_reports_the_join() {
    let out = qwjoin(&["analyze", "--family", "CP", "6", "--right-family", "O2", "--matrix", "l", "--pair", "0", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["join"]["pst"]["pst"], true);
    let tau = v["join"]["pst"]["tau"].as_f64().unwrap();
    assert!((tau - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
}

#[test]
fn graph_files_drive_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("k4.json");
    let out = qwjoin(&["join", "--left-family", "O2", "--right-family", "K2", "--out", path_str(&file)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let g: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(g["order"], 4);
    assert_eq!(g["edges"].as_array().unwrap().len(), 5);
    let out = qwjoin(&["analyze", "--graph", path_str(&file), "--matrix", "L", "--pair", "0", "1"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["pst"]["pst"], true);
}

#[test]
fn malformed_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"order": 2, "simple": true, "edges": [[0, 5, 1]]}"#).unwrap();
    assert_eq!(code(&qwjoin(&["analyze", "--graph", path_str(&bad), "--matrix", "L", "--pair", "0", "1"])), 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&qwjoin(&["analyze", "--graph", path_str(&missing), "--matrix", "L", "--pair", "0", "1"])), 1);
    assert_eq!(code(&qwjoin(&["analyze", "--family", "P", "3", "--matrix", "L", "--pair", "0", "9"])), 2);
    assert_eq!(code(&qwjoin(&["analyze", "--family", "P", "3", "--matrix", "X", "--pair", "0", "1"])), 2);
    assert_eq!(code(&qwjoin(&["pst-search", "--family", "nope", "--matrix", "L"])), 2);
    // an irregular operand violates the adjacency join assumptions
    let out = qwjoin(&["analyze", "--family", "P", "3", "--right-family", "O1", "--matrix", "A", "--pair", "0", "2"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
}

#[test]
fn search_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let args = |p: &Path| {
        vec!["pst-search", "--family", "double-cone", "--matrix", "L", "--max", "12", "--out"]
            .into_iter()
            .map(String::from)
            .chain([path_str(p).to_string()])
            .collect::<Vec<_>>()
    };
    let first: Vec<String> = args(&a);
    assert_eq!(code(&qwjoin(&first.iter().map(String::as_str).collect::<Vec<_>>())), 0);
    let text_a = std::fs::read_to_string(&a).unwrap();
    let b = dir.path().join("b.jsonl");
    let second = args(&b);
    let out = Command::new(env!("CARGO_BIN_EXE_qwjoin")).args(&second).env("QWJOIN_THREADS", "1").output().unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(text_a, std::fs::read_to_string(&b).unwrap());
    let hits: Vec<u64> = text_a
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .map(|v| v["params"][0][1].as_u64().unwrap())
        .collect();
    assert_eq!(hits, vec![2, 6, 10]);
}

#[test]
fn bound_sweep_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let out = qwjoin(&[
        "bound-sweep", "--family", "C4", "u", "O2", "--right-family", "O2", "--matrix", "L", "--pair", "0", "2",
        "--samples", "256", "--csv", path_str(&csv),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((summary["max_abs_F"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-6);
    assert_eq!(summary["tight"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,mag_join,mag_base,F,envelope");
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(rows.len() >= 256);
    assert_eq!(rows[0][0], 0.0);
    assert!(rows[0][3].abs() < 1e-12);
    assert!(rows.iter().all(|r| (r[4] - 1.0 / 3.0).abs() < 1e-15 && r[3].abs() <= r[4] + 1e-9));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&qwjoin(&["--help"])), 0);
    assert_eq!(code(&qwjoin(&["--version"])), 0);
    assert_eq!(code(&qwjoin(&[])), 2);
}

/// Graphs with a loop on vertex 0 and an irregular degree sequence break the
/// Laplacian and adjacency join assumptions respectively.
fn violating_graph() -> impl Strategy<Value = (String, &'static str)> {
    (2usize..6, 1u32..4).prop_flat_map(|(n, w)| {
        let looped = format!(
            r#"{{"order": {n}, "simple": false, "edges": [[0, 1, 1]], "loops": [[0, {w}]]}}"#
        );
        let path_edges: Vec<String> = (0..n.max(3) - 1).map(|i| format!("[{i}, {}, 1]", i + 1)).collect();
        let irregular = format!(r#"{{"order": {}, "simple": true, "edges": [{}]}}"#, n.max(3), path_edges.join(", "));
        prop_oneof![Just((looped, "L")), Just((irregular, "A"))]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn assumption_violations_never_exit_zero((graph, kind) in violating_graph(), sub in 0usize..2) {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("g.json");
        std::fs::write(&file, graph).unwrap();
        let csv = dir.path().join("s.csv");
        let args: Vec<&str> = if sub == 0 {
            vec!["analyze", "--graph", path_str(&file), "--right-family", "O2", "--matrix", kind, "--pair", "0", "1"]
        } else {
            vec!["bound-sweep", "--graph", path_str(&file), "--right-family", "O2", "--matrix", kind, "--pair", "0", "1", "--csv", path_str(&csv)]
        };
        let out = qwjoin(&args);
        prop_assert_eq!(code(&out), 2);
    }
}
