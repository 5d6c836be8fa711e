use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ccpt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccpt"))
        .current_dir(dir)
        .env_remove("CCPT_THRESHOLD")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = ccpt(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(dir: &Path, args: &[&str]) -> Value {
    serde_json::from_str(&ok(dir, args)).unwrap()
}

fn periods(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|p| p.as_u64().unwrap()).collect()
}

fn data_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn gen_presets_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--preset", "y1", "-o", "y1.csv"]);
    let rows = data_rows(&d.join("y1.csv"));
    assert_eq!(rows.len(), 72);
    assert!(rows.iter().all(|r| r.split(',').count() == 2));

    ok(d, &["gen", "--preset", "y2", "--seed", "7", "-o", "y2.csv"]);
    assert_eq!(data_rows(&d.join("y2.csv")).len(), 100);
    let meta: Value = serde_json::from_str(&fs::read_to_string(d.join("y2.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 7);
    assert!(meta["rng"].as_str().unwrap().contains("chacha20"));

    let first = fs::read(d.join("y2.csv")).unwrap();
    ok(d, &["gen", "--preset", "y2", "--seed", "7", "-o", "y2.csv"]);
    assert_eq!(fs::read(d.join("y2.csv")).unwrap(), first);

    let out = ok(d, &["gen", "--tiled-ccps", "5,1", "--len", "100"]);
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| !r.contains(',')));
}

#[test]
fn gen_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(ccpt(dir.path(), &["gen"]).status.code(), Some(2));
    assert_eq!(ccpt(dir.path(), &["gen", "--tiled-ccps", "6,2", "--len", "10"]).status.code(), Some(2));
    assert_eq!(ccpt(dir.path(), &["gen", "--preset", "y9"]).status.code(), Some(2));
}

#[test]
fn analyze_y1_ccpt_and_rpt() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--preset", "y1", "-o", "y1.csv"]);
    let r = json(d, &["analyze", "y1.csv", "--method", "ccpt", "--plot", "plot.csv"]);
    assert_eq!(r["schema"], "ccpt-report/1");
    assert_eq!(r["estimated_period"], 36);
    assert_eq!(periods(&r["detected"]), vec![9, 36]);
    let nonzero: Vec<u64> = r["strengths"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["normalized"].as_f64().unwrap() > 1e-6)
        .map(|s| s["period"].as_u64().unwrap())
        .collect();
    assert_eq!(nonzero, vec![9, 36]);
    assert_eq!(r["coefficients"].as_array().unwrap().len(), 72);
    assert!(r["coefficients"][0]["frequency"].is_number());
    assert_eq!(data_rows(&d.join("plot.csv")).len(), 73);

    let r = json(d, &["analyze", "y1.csv", "--method", "rpt"]);
    let coeffs = r["coefficients"].as_array().unwrap();
    let max = coeffs.iter().map(|c| c["magnitude"].as_f64().unwrap()).fold(0.0, f64::max);
    let s36: Vec<f64> = coeffs
        .iter()
        .filter(|c| c["label"].as_str().unwrap().starts_with("36:"))
        .map(|c| c["magnitude"].as_f64().unwrap())
        .collect();
    assert_eq!(s36.len(), 12);
    assert!(s36.iter().all(|&m| m > 1e-6 * max));
    assert!(coeffs[0].get("frequency").is_none());

    let r = json(d, &["analyze", "y1.csv", "--method", "dft"]);
    assert_eq!(r["estimated_period"], 36);
    assert_eq!(r["complexity"]["count"]["exact"], 4 * 72 * 72);
}

#[test]
fn report_round_trips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--preset", "y1", "-o", "y1.csv"]);
    ok(d, &["analyze", "y1.csv", "-o", "r.json"]);
    let text = fs::read_to_string(d.join("r.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let mut again = serde_json::to_string_pretty(&v).unwrap();
    again.push('\n');
    assert_eq!(again, text);
}

#[test]
fn threshold_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--preset", "y1", "-o", "y1.csv"]);
    let out = Command::new(env!("CARGO_BIN_EXE_ccpt"))
        .current_dir(d)
        .env("CCPT_THRESHOLD", "0.9")
        .args(["analyze", "y1.csv"])
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["threshold"], 0.9);
    assert_eq!(periods(&r["detected"]), vec![36]);

    assert_eq!(ccpt(d, &["analyze", "y1.csv", "--threshold", "0"]).status.code(), Some(2));
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("zeros.csv"), "# silence\n0\n0\n0\n0\n").unwrap();
    let out = ccpt(d, &["analyze", "zeros.csv"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no periodic content"));

    fs::write(d.join("ragged.csv"), "1,0\n2,0\n3\n").unwrap();
    let out = ccpt(d, &["analyze", "ragged.csv"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ragged.csv:3"));

    assert_eq!(ccpt(d, &["analyze", "missing.csv"]).status.code(), Some(3));
    assert_eq!(ccpt(d, &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn scan_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--preset", "y2", "--seed", "7", "-o", "y2.csv"]);
    let r = json(d, &["scan", "y2.csv", "--n1", "70", "--jobs", "3", "--csv", "scan.csv"]);
    let rows = r["scan"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 31);
    let row = |len: u64| rows.iter().find(|x| x["length"] == len).unwrap();
    assert_eq!(periods(&row(70)["detected"]), vec![5, 7]);
    assert_eq!(periods(&row(95)["detected"]), vec![5, 95]);
    assert!(r["scan"]["duplicated_subspaces"].as_u64().unwrap() > 0);
    assert_eq!(r["complexity"]["count"]["exact"], 452_910);
    let csv = data_rows(&d.join("scan.csv"));
    assert_eq!(csv[0], "length,detected");
    assert!(csv.contains(&"70,5;7".to_string()));

    let serial = json(d, &["scan", "y2.csv", "--n1", "70", "--jobs", "1"]);
    assert_eq!(serial["scan"]["rows"], r["scan"]["rows"]);

    assert_eq!(ccpt(d, &["scan", "y2.csv", "--n1", "101"]).status.code(), Some(2));
    assert_eq!(ccpt(d, &["scan", "y2.csv", "--n1", "2"]).status.code(), Some(2));
}

#[test]
fn scan_single_length_matches_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--preset", "y2", "--seed", "3", "-o", "y2.csv"]);
    let s = json(d, &["scan", "y2.csv", "--n1", "100"]);
    let a = json(d, &["analyze", "y2.csv"]);
    assert_eq!(s["scan"]["rows"][0]["strengths"], a["strengths"]);
}

#[test]
fn dictionary_bases_agree() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--preset", "y2", "--seed", "0", "-o", "y2.csv"]);
    for basis in ["ccpt", "farey", "rpt"] {
        let r = json(d, &["dict", "y2.csv", "--pmax", "80", "--basis", basis]);
        assert_eq!(periods(&r["detected"]), vec![1, 5, 7], "{basis}");
        assert_eq!(r["estimated_period"], 35);
        assert_eq!(r["dictionary"]["p_max"], 80);
        assert!(r["dictionary"]["residual"].as_f64().unwrap() < 1e-6);
        let has_freq = r["coefficients"][0].get("frequency").is_some();
        assert_eq!(has_freq, basis != "rpt", "{basis}");
    }

    fs::write(d.join("ones.csv"), "1\n".repeat(20)).unwrap();
    let r = json(d, &["dict", "ones.csv", "--pmax", "10", "--plot", "p.csv"]);
    assert_eq!(r["estimated_period"], 1);
    assert_eq!(data_rows(&d.join("p.csv")).len(), 11);
}

#[test]
fn compare_table() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--preset", "y2", "--seed", "0", "-o", "y2.csv"]);
    let table = ok(d, &["compare", "y2.csv", "--dict", "--pmax", "40", "-o", "cmp.json"]);
    let line = |m: &str| table.lines().find(|l| l.starts_with(m)).unwrap().to_string();
    assert!(line("ccpt ").contains("20000 real"));
    assert!(line("dft ").contains("40000 real"));
    let rpt = line("rpt ");
    assert_eq!(rpt.split_whitespace().nth(3), Some("no"));
    assert!(line("dict-farey").contains("2L"));

    let r: Value = serde_json::from_str(&fs::read_to_string(d.join("cmp.json")).unwrap()).unwrap();
    let rows = r["comparison"].as_array().unwrap();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[1]["frequency"], false);
}

#[test]
fn basis_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = ok(d, &["basis", "5"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "1:1:0,5:1:0,5:1:1,5:2:0,5:2:1");
    assert_eq!(lines.len(), 6);
    let row1: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    let c = |k: f64, n: f64| 2.0 * (2.0 * std::f64::consts::PI * k * n / 5.0).cos();
    let want = [1.0, c(1.0, 1.0), c(1.0, 0.0), c(2.0, 1.0), c(2.0, 0.0)];
    for (a, b) in row1.iter().zip(want) {
        assert!((a - b).abs() < 1e-15);
    }
    let field = lines[2].split(',').nth(1).unwrap();
    let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
    assert_eq!(mantissa.len(), 17);

    ok(d, &["basis", "72", "--block", "9", "-o", "b9.csv"]);
    let rows = data_rows(&d.join("b9.csv"));
    assert_eq!(rows.len(), 73);
    assert!(rows.iter().all(|r| r.split(',').count() == 6));

    assert_eq!(ok(d, &["basis", "1"]), "1:1:0\n1.0000000000000000e0\n");
    assert_eq!(ccpt(d, &["basis", "6", "--block", "4"]).status.code(), Some(2));
    let rpt = ok(d, &["basis", "12", "--kind", "rpt", "--block", "12"]);
    assert!(rpt.starts_with("12:-:0,12:-:1,12:-:2,12:-:3\n"));
}
