use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn urnlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_urnlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn uniform(m: usize, n: usize) -> Value {
    json!({"m": m, "n": n, "gamma": vec![vec![1; n]; m]})
}

#[test]
fn threshold_measure_example() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m2n2.json", &uniform(2, 2));
    let out = urnlab(&["measure", "--model", s(&model), "--thresholds", "1,1", "--oracle"]);
    assert_eq!(code(&out), 0);
    let mass = &stdout_json(&out)["result"]["mass"];
    assert_eq!(mass["1,1"], "1/2");
    assert_eq!(mass["1,0"], "1/4");
    assert_eq!(mass["0,1"], "1/4");
    assert!(mass.get("0,0").is_none());
}

#[test]
fn mainthm_b_with_window() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", &json!({"m": 3, "n": 3, "gamma": [[1, 2, 1], [2, 1, 1], [1, 1, 3]]}));
    let out = urnlab(&["verify", "--theorem", "mainthm-b", "--model", s(&model), "--window", "0:3", "--oracle"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["result"]["status"], "holds");
    assert_eq!(report["request"]["source"]["windows"], json!([[0, 0, 3], [1, 0, 3]]));
}

#[test]
fn welsh_scan_reports_exact_rationals() {
    let out = urnlab(&["conjecture", "welsh", "--scan-s", "1:20"]);
    assert_eq!(code(&out), 0);
    let result = &stdout_json(&out)["result"];
    let records = result["records"].as_array().unwrap();
    assert_eq!(records.len(), 20);
    for (k, r) in records.iter().enumerate() {
        assert_eq!(r["s"], k + 1);
        for key in ["p3", "p123", "p13", "p23"] {
            let text = r[key].as_str().unwrap();
            let (p, q) = text.split_once('/').unwrap();
            let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
            assert!(digits(p) && digits(q), "{text}");
        }
        assert_eq!(r["satisfied"], false);
    }
    assert_eq!(result["first_satisfied"], Value::Null);
    assert_eq!(result["frozen_first_s"], 120);
}

#[test]
fn replay_round_trips() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", &json!({"m": 3, "n": 3, "gamma": [["1/2", 2, 1], [2, 1, 1], [1, 1, 3]]}));
    let runs: [Vec<&str>; 4] = [
        vec!["law", "--model", s(&model), "--xy", "--i", "0", "--j", "1", "--window", "2:1:2"],
        vec!["check", "--property", "rayleigh", "--model", s(&model), "--thresholds", "1,1,1", "--seed", "5"],
        vec!["conjecture", "nmp", "--model", s(&model), "--k", "0,1", "--window", "0:1:2"],
        vec!["search", "--campaign", "farr", "--seed", "9", "--budget", "6"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let out = urnlab(args);
        assert!(code(&out) <= 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let report = dir.path().join(format!("r{k}.json"));
        std::fs::write(&report, &out.stdout).unwrap();
        let again = urnlab(&["replay", "--report", s(&report)]);
        assert_eq!(code(&again), 0, "{args:?}: {}", String::from_utf8_lossy(&again.stderr));
        assert_eq!(again.stdout, out.stdout, "{args:?}");
    }
}

#[test]
fn tampered_report_is_a_mismatch() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m.json", &uniform(2, 2));
    let out = urnlab(&["measure", "--model", s(&model), "--thresholds", "1,1"]);
    let mut report = stdout_json(&out);
    report["result"]["mass"]["1,1"] = json!("1/3");
    let path = write(&dir, "bad.json", &report);
    let again = urnlab(&["replay", "--report", s(&path)]);
    assert_eq!(code(&again), 1);
    let err: Value = serde_json::from_slice(&again.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "oracle_mismatch");
}

#[test]
fn reports_are_byte_stable() {
    let args = ["search", "--campaign", "qcna", "--seed", "4", "--budget", "5", "--samples", "4"];
    let a = urnlab(&args);
    let b = urnlab(&["--jobs", "1", "search", "--campaign", "qcna", "--seed", "4", "--budget", "5", "--samples", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();

    // Perfect positive correlation violates NC.
    let corr = write(&dir, "corr.json", &json!({"space": [2, 2], "mass": {"0,0": "1/2", "1,1": "1/2"}}));
    let out = urnlab(&["check", "--property", "nc", "--measure", s(&corr)]);
    assert_eq!(code(&out), 1);
    assert!(stdout_json(&out)["result"]["witness"].is_object());

    // A block that cannot be met.
    let model = write(&dir, "u22.json", &uniform(2, 2));
    let blocks = write(&dir, "blocks.json", &json!([{"cells": [[0, 0], [0, 1]], "lo": 2, "hi": 2}]));
    let out = urnlab(&["conjecture", "qq", "--model", s(&model), "--blocks", s(&blocks)]);
    assert_eq!(code(&out), 3);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "zero_probability");
    assert_eq!(err["error"]["exit_code"], 3);

    // Caps that stop the enumeration early.
    let m3 = write(&dir, "m3.json", &json!({"m": 3, "n": 3, "gamma": [[1, 2, 1], [2, 1, 1], [1, 1, 3]]}));
    let out = urnlab(&["check", "--property", "na", "--model", s(&m3), "--thresholds", "1,1,1", "--max-side-points", "2"]);
    assert_eq!(code(&out), 4);
    assert_eq!(stdout_json(&out)["result"]["status"], "inconclusive");

    // Usage errors.
    assert_eq!(code(&urnlab(&["measure", "--model", s(&model)])), 2);
    assert_eq!(code(&urnlab(&["verify", "--theorem", "nope", "--model", s(&model)])), 2);
    assert_eq!(code(&urnlab(&["measure", "--model", "/nonexistent.json", "--thresholds", "1,1"])), 2);
    assert_eq!(code(&urnlab(&["search", "--campaign", "farr"])), 2);
    assert_eq!(code(&urnlab(&["law", "--model", s(&model), "--window", "0:1"])), 2);
}

#[test]
fn csv_output() {
    let dir = TempDir::new().unwrap();
    let model = write(&dir, "m2n2.json", &uniform(2, 2));
    let out = urnlab(&["--format", "csv", "measure", "--model", s(&model), "--thresholds", "1,1"]);
    assert_eq!(code(&out), 0);
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    assert_eq!(rdr.headers().unwrap(), vec!["outcome", "mass", "mass_approx"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    let top = rows.iter().find(|r| &r[0] == "1,1").unwrap();
    assert_eq!(&top[1], "1/2");
    assert_eq!(top[2].parse::<f64>().unwrap(), 0.5);

    let out = urnlab(&["conjecture", "welsh", "--s", "3", "--format", "csv"]);
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let h = rdr.headers().unwrap().clone();
    assert_eq!(&h[0], "s");
    assert!(h.iter().any(|c| c == "lhs_approx"));
    assert_eq!(rdr.records().count(), 1);
}

#[test]
fn orientation_counts() {
    let dir = TempDir::new().unwrap();
    let tri = write(&dir, "tri.json", &json!({"vertices": 3, "edges": [[0, 1], [1, 2], [0, 2]]}));
    // Out-degree exactly 1 everywhere: the two cyclic orientations.
    let out = urnlab(&["orient", "count", "--graph", s(&tri), "--a", "1,1,1", "--b", "1,1,1"]);
    assert_eq!(stdout_json(&out)["result"]["count"], 2);
    let out = urnlab(&["orient", "distribution", "--graph", s(&tri)]);
    let counts: u64 = stdout_json(&out)["result"]["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(counts, 8);
    let out = urnlab(&["orient", "glemma", "--graph", s(&tri)]);
    assert_eq!(code(&out), 0);
}
