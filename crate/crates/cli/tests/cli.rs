use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ncmckay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncmckay")).args(args).env_remove("NCMCKAY_MAX_UNKNOWNS").output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn verify_tilting_reports_commutator() {
    let out = ncmckay(&["verify", "tilting", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["passed"], true);
    let check = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "uv-commutator").unwrap();
    assert_eq!(check["claim"], "uv - vu = diag(-t1, t0 + t1) on chart 0");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true && c["suite"] == "tilting"));
}

#[test]
fn verify_all_degenerate_case() {
    let out = ncmckay(&["verify", "all", "--n", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["failures"], 0);
    assert_eq!(v["suites"].as_array().unwrap().len(), 5);
}

#[test]
fn verify_iso_n3() {
    let out = ncmckay(&["verify", "iso", "--n", "3", "--deg", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["passed"], true);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let out = ncmckay(&["verify", "cbh", "--n", "2", "--samples", "10", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    // keys sorted: "checks" precedes "failures" precedes "n"
    let (c, f, n) = (text.find("\"checks\"").unwrap(), text.find("\"failures\"").unwrap(), text.find("\"n\"").unwrap());
    assert!(c < f && f < n);
}

#[test]
fn dims_ext1_vanishes() {
    let out = ncmckay(&["dims", "ext1", "--n", "2", "--src", "0", "--tgt", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let slices = v["slices"].as_array().unwrap();
    assert!(!slices.is_empty());
    assert!(slices.iter().all(|s| s["h1"] == 0 && s["stable"] == true));
    assert_eq!(v["total"], 0);
}

#[test]
fn dims_hom_constants_only() {
    let out = ncmckay(&["dims", "hom", "--n", "1", "--src", "0", "--tgt", "0", "--deg", "0", "--basis"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["total"], 1);
    let hom = &v["slices"][0]["basis"][0];
    assert_eq!(hom["components"], serde_json::json!(["1", "1"]));
    assert_eq!(hom["source_d"], serde_json::json!([0]));
}

#[test]
fn dims_s_block_table() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    let out = ncmckay(&["dims", "s-block", "--n", "1", "--i", "0", "--j", "0", "--deg", "3", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let dims: Vec<u64> = read_json(&p)["slices"].as_array().unwrap().iter().map(|s| s["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, [1, 0, 3, 0]);
}

#[test]
fn show_u_glues() {
    let out = ncmckay(&["show", "u", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["glues"], true);
    let blocks = v["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 2);
    assert_eq!(blocks[0]["hom"]["components"], serde_json::json!(["x", "1"]));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "n = 1\nmax_n = 1\n").unwrap();
    let out = ncmckay(&["verify", "scheme", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["n"], 1);
    // the file caps n; a larger flag is a usage error
    let out = ncmckay(&["verify", "scheme", "--n", "2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&cfg, "colour = 3\n").unwrap();
    assert_eq!(ncmckay(&["verify", "scheme", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn error_kinds_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no/such/dir/out.json");
    let out = ncmckay(&["dims", "s-block", "--n", "1", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("I/O error"));

    let cfg = dir.path().join("missing.toml");
    assert_eq!(ncmckay(&["verify", "scheme", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));

    assert_eq!(ncmckay(&["verify", "tilting", "--n", "5"]).status.code(), Some(2));
    assert_eq!(ncmckay(&["dims", "hom", "--n", "1", "--src", "2"]).status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_ncmckay"))
        .args(["dims", "ext1", "--n", "2", "--tgt", "1"])
        .env("NCMCKAY_MAX_UNKNOWNS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}
