use std::fs;
use std::path::{Path, PathBuf};

use cubeprobe_cli::{run_cli, EXIT_BUDGET, EXIT_OK, EXIT_REJECT, EXIT_USAGE};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cubeprobe-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn fork4(dir: &Path) -> String {
    let path = dir.join("fork4.json");
    fs::write(&path, r#"{"elements":4,"relations":[[1,2],[1,3],[2,4]]}"#).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(stdout: &str) -> serde_json::Value {
    serde_json::from_str(stdout).unwrap()
}

#[test]
fn estimate_reports_fork4_params() {
    let dir = scratch("estimate");
    let f = fork4(&dir);
    let out = run_cli([
        "cubeprobe", "estimate", &f, "--sampler", "biased-equal", "--zeta", "0.3", "--delta", "0.2",
        "--seed", "1", "--format", "json",
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = json(&out.stdout);
    assert_eq!(v["dim"], 2);
    assert_eq!(v["params"]["alpha"], 67);
    assert_eq!(v["params"]["k"], 3430);
    assert_eq!(v["seed"], 1);
    assert!(v["verdict"].is_null());
    let est = v["estd_dtv"].as_f64().unwrap();
    assert!((0.0..1.0).contains(&est));
    assert!(v["samples"].as_u64().unwrap() > 0);
    assert!(v["wall_time"].as_f64().unwrap() >= 0.0);
}

#[test]
fn test_accepts_uniform() {
    let dir = scratch("test");
    let f = fork4(&dir);
    let out = run_cli([
        "cubeprobe", "test", &f, "--sampler", "uniform", "--epsilon", "0.01", "--eta", "0.61", "--delta",
        "0.1", "--seed", "7", "--format", "json",
    ]);
    assert_eq!(out.code, EXIT_OK);
    let v = json(&out.stdout);
    assert_eq!(v["verdict"], "A");
    assert!((v["params"]["threshold_k"].as_f64().unwrap() - 0.31).abs() < 1e-12);
    assert!((v["params"]["zeta"].as_f64().unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn test_rejects_far_sampler() {
    let dir = scratch("reject");
    let path = dir.join("anti3.json");
    fs::write(&path, r#"{"elements":3,"relations":[]}"#).unwrap();
    let out = run_cli(["cubeprobe", "test", path.to_str().unwrap(), "--sampler", "biased:1,16,256"]);
    assert_eq!(out.code, EXIT_REJECT);
    assert!(out.stdout.contains(" R\n"), "{}", out.stdout);
}

#[test]
fn table_has_report_columns() {
    let dir = scratch("table");
    let f = fork4(&dir);
    let out = run_cli(["cubeprobe", "estimate", &f, "--zeta", "0.5"]);
    assert_eq!(out.code, EXIT_OK);
    let header = out.stdout.lines().next().unwrap();
    for col in ["Estd dTV", "#samples", "A/R"] {
        assert!(header.contains(col));
    }
}

#[test]
fn budget_exit_keeps_partial_report() {
    let dir = scratch("budget");
    let f = fork4(&dir);
    let out = run_cli(["cubeprobe", "estimate", &f, "--max-samples", "100000", "--format", "json"]);
    assert_eq!(out.code, EXIT_BUDGET);
    let v = json(&out.stdout);
    assert_eq!(v["complete"], false);
    assert!(v["samples"].as_u64().unwrap() <= 100_000);
    assert!(out.stderr.contains("partial"));
}

#[test]
fn oracle_prints_rational_and_decimal() {
    let dir = scratch("oracle");
    let f = fork4(&dir);
    let out = run_cli(["cubeprobe", "oracle-dtv", &f, "--p", "biased-equal", "--q", "uniform"]);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(out.stdout, "1/6 ≈ 0.166667\n");
    let out = run_cli(["cubeprobe", "oracle-dtv", &f, "--p", "uniform"]);
    assert_eq!(out.stdout, "0 ≈ 0.000000\n");
}

#[test]
fn gen_writes_named_instance() {
    let dir = scratch("gen");
    let out = run_cli(["cubeprobe", "gen", "avgdeg_3", "--size", "8", "--index", "2", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK);
    let path = dir.join("avgdeg_3_008_2.json");
    assert_eq!(out.stdout.trim(), path.to_str().unwrap());
    let again = run_cli(["cubeprobe", "gen", "avgdeg_3", "--size", "8", "--index", "2"]);
    assert_eq!(fs::read_to_string(&path).unwrap(), again.stdout);
    let est = run_cli(["cubeprobe", "estimate", path.to_str().unwrap(), "--zeta", "0.6", "--format", "json"]);
    assert_eq!(est.code, EXIT_OK, "{}", est.stderr);
}

#[test]
fn encode_cnf_writes_dimacs() {
    let dir = scratch("cnf");
    let f = fork4(&dir);
    let target = dir.join("fork4.cnf");
    let out = run_cli(["cubeprobe", "encode-cnf", &f, "--cnf-out", target.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_OK);
    let text = fs::read_to_string(&target).unwrap();
    assert!(text.starts_with("p cnf 6 28\n"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = scratch("usage");
    let f = fork4(&dir);
    assert_eq!(run_cli(["cubeprobe", "estimate"]).code, EXIT_USAGE);
    assert_eq!(run_cli(["cubeprobe", "estimate", &f, "--zeta", "1.5"]).code, EXIT_USAGE);
    assert_eq!(run_cli(["cubeprobe", "gen", "grid_2", "--size", "4"]).code, EXIT_USAGE);
    let bad = dir.join("cycle.json");
    fs::write(&bad, r#"{"elements":2,"relations":[[1,2],[2,1]]}"#).unwrap();
    let out = run_cli(["cubeprobe", "estimate", bad.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stderr.contains("cycle"));
    let out = run_cli(["cubeprobe", "estimate", &f, "--sampler", "biased:1,2"]);
    assert_eq!(out.code, EXIT_USAGE);
}
