use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn powerprog(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_powerprog"));
    cmd.args(args).env_remove("POWERPROG_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("powerprog-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(powerprog(&["frobnicate"], &[]).status.code(), Some(2));
    assert_eq!(powerprog(&["patterns", "--alphabet", "2n", "--length", "13"], &[]).status.code(), Some(2));
    assert_eq!(powerprog(&["report"], &[("POWERPROG_WORKERS", "many")]).status.code(), Some(2));
    let bad = temp_file("bad.json", r#"{"no_such_field": 1}"#);
    assert_eq!(powerprog(&["report", "--config", bad.to_str().unwrap()], &[]).status.code(), Some(2));
}

#[test]
fn default_report_is_green_and_reproducible() {
    let one = powerprog(&["report"], &[("POWERPROG_WORKERS", "1")]);
    let four = powerprog(&["report", "--workers", "4"], &[]);
    assert_eq!(one.status.code(), Some(0), "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(four.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);

    let report = stdout_json(&one);
    assert_eq!(report["schema"], "v1");
    assert_eq!(report["passed"], true);
    let entries = report["entries"].as_array().unwrap();
    assert!(entries.len() >= 15);
    for e in entries {
        assert_eq!(e["status"], "pass", "{}", e["claim"]);
        assert!(!e["citation"].as_str().unwrap().is_empty(), "{}", e["claim"]);
        let level = e["evidence_level"].as_str().unwrap();
        assert!(level == "exact-proof-replay" || level == "consistency-scan");
    }
    let scans: Vec<&str> = entries
        .iter()
        .filter(|e| e["evidence_level"] == "consistency-scan")
        .map(|e| e["claim"].as_str().unwrap())
        .collect();
    assert!(scans.contains(&"curves.C1") && scans.contains(&"points.E134"));
    assert_eq!(report["notes"][0]["computed"], "-1");
}

#[test]
fn tampered_bound_fails_the_report() {
    let cfg = temp_file("tamper.json", r#"{"mutations": [{"rule": "R2-nn2w", "n_min": 5}], "search_bound": 1000}"#);
    let out = powerprog(&["report", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("engine.bound_guard"), "{stderr}");
    assert!(stderr.contains("wrongly_pruned"), "{stderr}");
    assert_eq!(stdout_json(&out)["passed"], false);

    let flag = powerprog(&["report", "--search-bound", "1000", "--tamper", "R2-nn2w=5"], &[]);
    assert_eq!(flag.status.code(), Some(1));
    assert_eq!(powerprog(&["report", "--tamper", "R9-none=5"], &[]).status.code(), Some(2));
}

#[test]
fn flags_override_the_config_file() {
    let cfg = temp_file("override.json", r#"{"search_bound": 1000, "point_height": 50}"#);
    let out = powerprog(&["report", "--config", cfg.to_str().unwrap(), "--search-bound", "10000"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let config = &stdout_json(&out)["config"];
    assert_eq!(config["search_bound"], 10000);
    assert_eq!(config["point_height"], 50);
}

#[test]
fn markdown_mirrors_json() {
    let md = powerprog(&["report", "--format", "markdown", "--search-bound", "10000"], &[]);
    assert_eq!(md.status.code(), Some(0));
    let text = String::from_utf8(md.stdout).unwrap();
    let json = stdout_json(&powerprog(&["report", "--search-bound", "10000"], &[]));
    for e in json["entries"].as_array().unwrap() {
        assert!(text.contains(&format!("### {}", e["claim"].as_str().unwrap())));
    }
    assert!(text.contains("norm.beta"));
}

#[test]
fn patterns_json_shape() {
    let out = powerprog(&["patterns", "--alphabet", "3n", "--length", "4", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["alphabet"], "{3,n>=5}");
    assert_eq!(v["survivors"].as_array().unwrap().len(), 4);
    let pruned = v["pruned"].as_array().unwrap();
    assert_eq!(pruned.len(), 12);
    assert!(pruned.iter().all(|p| p["rule"].is_string() && p["citation"].is_string() && p["positions"].is_array()));
}

#[test]
fn search_streams_ndjson() {
    let out = powerprog(&["search", "--alphabet", "25", "--bound", "10000", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let records: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let hit = records.iter().find(|r| r["first"] == 9 && r["diff"] == 3116).expect("(9, 3125, 6241)");
    assert_eq!(hit["terms"], serde_json::json!([9, 3125, 6241]));
    assert_eq!(hit["patterns"], serde_json::json!(["(2,5,2)"]));
    assert_eq!(hit["length"], 3);
    let trivial = records.iter().find(|r| r["first"] == -1 && r["diff"] == 1).unwrap();
    assert_eq!(trivial["trivial_positions"], serde_json::json!([1, 2, 3]));

    let squares = powerprog(&["search", "--alphabet", "2", "--bound", "100000", "--min-len", "4", "--json"], &[]);
    assert!(squares.stdout.is_empty());
}

#[test]
fn curves_and_torsion() {
    let out = powerprog(&["curves", "--scan", "C1", "--height", "30", "--json", "--claimed"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let docs: Vec<Value> = serde_json::Deserializer::from_slice(&out.stdout)
        .into_iter()
        .map(|v| v.unwrap())
        .collect();
    assert_eq!(docs[0]["evidence_level"], "scan");
    let xs: Vec<&str> = docs[0]["points"].as_array().unwrap().iter().map(|p| p["X"].as_str().unwrap()).collect();
    assert_eq!(xs, vec!["-1/3", "-1/3", "1", "1"]);
    assert_eq!(docs[1]["evidence_level"], "verified");
    assert_eq!(powerprog(&["curves", "--scan", "C1", "--height", "20000"], &[]).status.code(), Some(2));

    let out = powerprog(&["torsion", "--family", "134", "--json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let t = stdout_json(&out);
    let points = t["points"].as_array().unwrap();
    assert_eq!(points.len(), 8);
    assert!(points.iter().all(|p| !p["progression"]["rejections"].as_array().unwrap().is_empty()));
    assert_eq!(powerprog(&["torsion", "--family", "123"], &[]).status.code(), Some(2));
}

#[test]
fn identities_emit_a_json_array() {
    let out = powerprog(&["identities"], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 14);
    assert!(arr.iter().all(|r| r["status"] == "holds" && r.get("counterexample").is_none()));
}
