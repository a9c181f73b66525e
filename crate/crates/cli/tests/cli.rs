// Copyright 2026 The alf-entropy Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CHAIN: &str = "[source]\nkind = \"chain\"\np = 0.25\nr = 0.1\n";
const BERNOULLI: &str = "[source]\nkind = \"bernoulli\"\nprobabilities = [0.4, 0.25, 0.25, 0.1]\n";

fn alf(dir: &Path, config: &str, args: &[&str]) -> Output {
    let cfg = dir.join("scenario.toml");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_alf"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out").join(name)).unwrap()).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn entropy_scan_figure_setup() {
    let tmp = TempDir::new().unwrap();
    let out = alf(tmp.path(), CHAIN, &["entropy-scan"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(tmp.path().join("out/entropy_scan.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "delta_over_p,h_closed_form,h_measured_increment,qr_rate,backflow_measure,region"
    );
    assert_eq!(lines.len(), 51);
    let h: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(h.windows(2).all(|w| w[1] <= w[0]));
    assert!((h[0] - 1.289_921_982_61).abs() < 1e-10);
    assert!(lines[1].ends_with(",CP"));
    assert!(lines[50].ends_with(",nonP"));
    let raw = fs::read_to_string(tmp.path().join("out/entropy_scan.json")).unwrap();
    assert!(raw.contains("\"cp\": 0.240000000000"));
    assert!(raw.contains("\"tensor_p\": 0.488528137424"));
    assert!(raw.contains("\"p\": 0.840000000000"));
}

#[test]
fn entropy_scan_zero_entropy_end() {
    let tmp = TempDir::new().unwrap();
    let cfg = "[source]\nkind = \"chain\"\np = 0.5\nr = 0.0\n[run]\ndelta_over_p = [1.0]\n";
    let out = alf(tmp.path(), cfg, &["entropy-scan"]);
    assert!(out.status.success());
    let v = json(tmp.path(), "entropy_scan.json");
    assert_eq!(num(&v["rows"][0]["h_closed_form"]), 0.0);
    assert_eq!(v["rows"][0]["region"], "undefined");
}

#[test]
fn output_is_bit_identical_across_thread_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(alf(a.path(), CHAIN, &["entropy-scan", "--threads", "1"])
        .status
        .success());
    assert!(alf(b.path(), CHAIN, &["entropy-scan", "--threads", "4"])
        .status
        .success());
    for f in ["entropy_scan.csv", "entropy_scan.json"] {
        assert_eq!(
            fs::read(a.path().join("out").join(f)).unwrap(),
            fs::read(b.path().join("out").join(f)).unwrap()
        );
    }
}

#[test]
fn bits_flag_converts_entropies() {
    let nats = TempDir::new().unwrap();
    let bits = TempDir::new().unwrap();
    alf(nats.path(), CHAIN, &["entropy-scan"]);
    alf(bits.path(), CHAIN, &["entropy-scan", "--bits"]);
    let a = json(nats.path(), "entropy_scan.json");
    let b = json(bits.path(), "entropy_scan.json");
    assert_eq!(b["log_base"], "2");
    let ratio = num(&a["rows"][3]["h_closed_form"]) / num(&b["rows"][3]["h_closed_form"]);
    assert!((ratio - std::f64::consts::LN_2).abs() < 1e-10);
}

#[test]
fn divisibility_examples() {
    for (delta, region) in [
        (0.0, "CP"),
        (0.1, "tensorP-not-CP"),
        (0.15, "P-not-tensorP"),
        (0.225, "nonP"),
    ] {
        let tmp = TempDir::new().unwrap();
        let cfg = format!("{CHAIN}delta = {delta}\n");
        assert!(alf(tmp.path(), &cfg, &["divisibility"]).status.success());
        let v = json(tmp.path(), "divisibility.json");
        assert_eq!(v["region"], region, "Δ = {delta}");
    }
}

#[test]
fn coarse_grain_examples() {
    let tmp = TempDir::new().unwrap();
    assert!(alf(
        tmp.path(),
        &format!("{CHAIN}delta = 0.1\n"),
        &["coarse-grain"]
    )
    .status
    .success());
    let v = json(tmp.path(), "coarse_grain.json");
    assert!(num(&v["discrepancy"]) <= 1e-8);

    let tmp = TempDir::new().unwrap();
    let cfg = format!("{BERNOULLI}[run]\nn = 3\n");
    assert!(alf(tmp.path(), &cfg, &["coarse-grain"]).status.success());
    let v = json(tmp.path(), "coarse_grain.json");
    let h1 = 1.289_921_982_609_012;
    assert!((num(&v["entropy"]) - (2.0 * 2f64.ln() + 3.0 * h1)).abs() < 1e-9);

    let tmp = TempDir::new().unwrap();
    let cfg = format!("{BERNOULLI}[run]\nn = 1\npovm = \"trivial\"\n");
    assert!(alf(tmp.path(), &cfg, &["coarse-grain"]).status.success());
    let v = json(tmp.path(), "coarse_grain.json");
    assert!(num(&v["entropy"]).abs() < 1e-12);
    assert!(v["factorized"].is_null());
}

#[test]
fn qr_check_dichotomy() {
    let tmp = TempDir::new().unwrap();
    assert!(alf(tmp.path(), BERNOULLI, &["qr-check"]).status.success());
    let v = json(tmp.path(), "qr_check.json");
    assert_eq!(v["holds"], true);
    assert_eq!(v["factors"].as_array().unwrap().len(), 2);

    let tmp = TempDir::new().unwrap();
    assert!(
        alf(tmp.path(), &format!("{CHAIN}delta = 0.1\n"), &["qr-check"])
            .status
            .success()
    );
    let v = json(tmp.path(), "qr_check.json");
    assert_eq!(v["holds"], false);
    assert!(num(&v["deviation"]) > 1e-3);
    assert!(v["factors"].is_null());
}

#[test]
fn superactivation_reports_witness_at_invertible_point() {
    let tmp = TempDir::new().unwrap();
    let cfg = "[source]\nkind = \"chain\"\np = 0.24\nr = 0.1\ndelta = 0.12\n";
    let out = alf(tmp.path(), cfg, &["superactivation", "--seed", "3"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(tmp.path(), "superactivation.json");
    assert_eq!(v["one_qubit_revives"], false);
    assert_eq!(v["random_probe_revivals"], 0);
    assert_eq!(v["gns_revives"], true);
    assert!(num(&v["witness"]["magnitude"]) > 1e-6);
    assert_eq!(v["seed"], 3);
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = alf(
        tmp.path(),
        &format!("{CHAIN}colour = 1\n"),
        &["divisibility"],
    );
    assert_eq!(out.status.code(), Some(2));

    let out = alf(
        tmp.path(),
        &format!("{CHAIN}delta = 0.3\n"),
        &["divisibility"],
    );
    assert_eq!(out.status.code(), Some(2));

    let out = alf(tmp.path(), BERNOULLI, &["divisibility"]);
    assert_eq!(out.status.code(), Some(2));

    let out = alf(
        tmp.path(),
        &format!("{BERNOULLI}[run]\nn = 12\n"),
        &["coarse-grain"],
    );
    assert_eq!(out.status.code(), Some(3));

    let out = Command::new(env!("CARGO_BIN_EXE_alf"))
        .arg("divisibility")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
