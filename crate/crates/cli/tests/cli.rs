use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fibstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibstat"))
        .args(args)
        .env_remove("FIBSTAT_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn transform_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let image = dir.path().join("image.json");
    let out = fibstat(&["transform", "--gen", "harmonic_perturbed:c=2,amp=1:20", "--output", path(&image)]);
    assert!(out.status.success());

    let out = fibstat(&["transform", "--input", path(&image), "--direction", "invert", "--arithmetic", "exact"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    // terms is the default domain and is left out of the file
    assert!(doc.get("domain").is_none());
    // the image went through f64, and inversion amplifies that rounding
    // roughly geometrically, so keep the prefix short
    let values = doc["values"].as_array().unwrap();
    assert_eq!(values.len(), 20);
    for (k, v) in values.iter().enumerate() {
        let expect = 2.0 + 1.0 / (k + 1) as f64;
        assert!((v.as_f64().unwrap() - expect).abs() < 1e-6, "term {}", k + 1);
    }
}

#[test]
fn density_of_the_squares() {
    let out = fibstat(&["density", "--set", "squares", "--n-max", "10000"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["size"], 100);
    let verdict = &doc["lower"]["verdict"];
    assert_eq!(verdict["kind"], "zero", "{verdict}");

    let out = fibstat(&["density", "--set", "squares"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_reads_a_sequence_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.json");
    let values: Vec<f64> = vec![-0.75; 3000];
    let doc = serde_json::json!({"name": "constant", "dim": 1, "values": values, "domain": "image"});
    std::fs::write(&file, doc.to_string()).unwrap();

    let out = fibstat(&["analyze", "--input", path(&file), "--mode", "fsca-ifn"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["result"]["verdict"]["kind"], "cauchy");
    assert_eq!(doc["input"]["length"], 3000);
    assert_eq!(doc["config"]["mode"], "fsca-ifn");
}

#[test]
fn profile_csv_has_the_documented_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let out = fibstat(&["analyze", "--gen", "alternating::2000", "--L", "0", "--profile", path(&csv)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,ratio"));
    let last = lines.last().unwrap();
    assert!(last.starts_with("2000,0.5"), "{last}");
}

#[test]
fn seed_environment_variable_overrides_the_flag() {
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fibstat"));
        cmd.args(["analyze", "--gen", "const:c=1:200", "--seed", "7"]);
        match env {
            Some(v) => cmd.env("FIBSTAT_SEED", v),
            None => cmd.env_remove("FIBSTAT_SEED"),
        };
        cmd.output().unwrap()
    };
    assert_eq!(json(&run(None))["config"]["seed"], 7);
    assert_eq!(json(&run(Some("42")))["config"]["seed"], 42);
    assert_eq!(run(Some("minus one")).status.code(), Some(2));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let out = fibstat(&["analyze", "--gen", "const:c=abc:100"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("abc"));

    let out = fibstat(&["analyze", "--gen", "const::100", "--L", "1,2"]);
    assert_eq!(out.status.code(), Some(2));

    let out = fibstat(&["analyze", "--input", "/nonexistent/seq.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn broken_ifn_fails_the_checks() {
    let out = fibstat(&["axioms", "--ifn", "broken", "--samples", "500"]);
    assert_eq!(out.status.code(), Some(1));

    let out = fibstat(&["axioms", "--samples", "500"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = fibstat(&[
        "theorems", "--ifn", "broken", "--samples", "500",
        "--family", "const:c=1:2000", "--family", "alternating::2000",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}
