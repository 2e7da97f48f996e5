use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qrainbow"));
    c.env_remove("QRAINBOW_THREADS");
    c
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn assert_valid(schema: &str, instance: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(repo(schema)).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(instance).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{schema} violations: {errors:?}");
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn simulate_single_pair() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"J": [1], "h": [0]}"#);
    let report = json_stdout(&run(&["simulate", cfg.to_str().unwrap()]));
    assert_valid("schemas/report.schema.json", &report);
    assert!((num(&report["ansatz"]["fidelity"]) - 1.0).abs() < 1e-12);
    let s = num(&report["entanglement"]["exact"]["vn_entropy"]);
    assert!((s - std::f64::consts::LN_2).abs() < 1e-12);
    assert!((num(&report["exact"]["energy"]) + 2.0).abs() < 1e-12);
}

#[test]
fn simulate_strongly_inhomogeneous_pair() {
    let out = run(&["simulate", repo("examples_configs/chain_n2.json").to_str().unwrap()]);
    let report = json_stdout(&out);
    assert_valid("schemas/report.schema.json", &report);
    assert!(num(&report["ansatz"]["fidelity"]) >= 0.999);
    assert_eq!(report["spec"]["pairs"], 2);
    assert_eq!(report["q_profile"]["q"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_writes_out_file() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"pairs": 2, "J": [1, 0.1], "h": [0.5, 0.01]}"#);
    let out = dir.path().join("r.json");
    let o = run(&["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_valid("schemas/report.schema.json", &report);
}

#[test]
fn input_errors_exit_2() {
    let o = run(&["simulate", "/nonexistent/chain.json"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "bad.json", "{\n  \"J\": [1,\n  \"h\": [0]\n}");
    let o = run(&["simulate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");

    let cfg = write(&dir, "neg.json", r#"{"J": [-1], "h": [0]}"#);
    assert_eq!(run(&["simulate", cfg.to_str().unwrap()]).status.code(), Some(2));

    let cfg = write(&dir, "empty.json", r#"{"targets": {"eps": []}, "J": []}"#);
    assert_eq!(run(&["design", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn size_cap_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.json", r#"{"J": [1, 0.1, 0.01], "h": [0, 0, 0]}"#);
    let o = run(&["simulate", cfg.to_str().unwrap(), "--size-cap", "16"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn designer_errors_exit_4() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "t.json", r#"{"targets": {"eps": [3000]}, "J": [1]}"#);
    assert_eq!(run(&["design", cfg.to_str().unwrap()]).status.code(), Some(4));
    let cfg = write(&dir, "t0.json", r#"{"targets": {"S": [0.3, 0.0]}, "J": [1, 0.1]}"#);
    assert_eq!(run(&["design", cfg.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn design_prime_target_writes_files() {
    let dir = TempDir::new().unwrap();
    let target = repo("examples_configs/design_prime_s2.json");
    let out = dir.path().join("prime");
    let o = run(&["design", target.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8_lossy(&o.stderr);
    assert!(table.contains("eps_target"));

    let read = |n: &str| -> Value { serde_json::from_str(&std::fs::read_to_string(out.join(n)).unwrap()).unwrap() };
    let (spec, design, report) = (read("spec.json"), read("design.json"), read("report.json"));
    assert_valid("schemas/chain-spec.schema.json", &spec);
    assert_valid("schemas/report.schema.json", &report);
    let expect = [2.0 * 5f64.ln(), 2.0 * 3f64.ln(), 2.0 * 2f64.ln()];
    for (a, b) in design["eps_ansatz"].as_array().unwrap().iter().zip(expect) {
        assert!((num(a) - b).abs() < 1e-9);
    }
    assert_eq!(report["validity_warnings"], serde_json::json!([2]));
}

#[test]
fn design_entropy_targets_record_permutation() {
    let o = run(&["design", repo("examples_configs/design_entropies.json").to_str().unwrap()]);
    let v = json_stdout(&o);
    assert_eq!(v["design"]["permutation"], serde_json::json!([0, 1]));
    assert_valid("schemas/report.schema.json", &v["report"]);

    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "t.json", r#"{"targets": {"S": [0.6, 0.2]}, "J": [1, 0.1], "ordering": "optimal"}"#);
    let v = json_stdout(&run(&["design", cfg.to_str().unwrap()]));
    assert_eq!(v["design"]["permutation"], serde_json::json!([1, 0]));
    assert!(num(&v["report"]["ansatz"]["fidelity"]) > 0.99);
}

#[test]
fn sweep_is_deterministic_across_threads() {
    let grid = repo("examples_configs/sweep_fig4.json");
    let a = run(&["sweep", grid.to_str().unwrap(), "--threads", "1"]);
    let b = run(&["sweep", grid.to_str().unwrap(), "--threads", "4"]);
    let c = bin().args(["sweep", grid.to_str().unwrap()]).env("QRAINBOW_THREADS", "3").output().unwrap();
    assert!(a.status.success() && b.status.success() && c.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("h1,h2,S_A2,fidelity"));
    assert_eq!(lines.count(), 4 * 101);
}

#[test]
fn sweep_fig8_uniform_q() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("fig8.csv");
    let grid = repo("examples_configs/sweep_fig8.json");
    let o = run(&["sweep", grid.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,S,fidelity"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 91);
    assert!(rows.iter().all(|r| 1.0 - r[2] < 5e-4));
    assert!((rows[0][1] - 2.0 * std::f64::consts::LN_2).abs() < 1e-3);
}

#[test]
fn example_configs_match_schemas() {
    let read = |n: &str| -> Value { serde_json::from_str(&std::fs::read_to_string(repo(n)).unwrap()).unwrap() };
    assert_valid("schemas/chain-spec.schema.json", &read("examples_configs/chain_n2.json"));
    assert_valid("schemas/design-target.schema.json", &read("examples_configs/design_prime_s2.json"));
    assert_valid("schemas/design-target.schema.json", &read("examples_configs/design_entropies.json"));
    assert_valid("schemas/sweep-grid.schema.json", &read("examples_configs/sweep_fig4.json"));
    assert_valid("schemas/sweep-grid.schema.json", &read("examples_configs/sweep_fig8.json"));
}

#[test]
fn prime_and_uniform_q_commands() {
    let v = json_stdout(&run(&["prime", "--s", "2", "--pairs", "3"]));
    assert_eq!(v["spectrum"]["primes"], serde_json::json!([5, 3, 2]));
    let a_f = num(&v["normalization"]["A_F"]);
    assert!((a_f - std::f64::consts::PI.powi(2) / 15.0).abs() < 1e-8);
    assert!(v.get("design").is_none());

    let v = json_stdout(&run(&["prime", "--s", "2", "--pairs", "2", "--J", "1,0.01"]));
    assert_valid("schemas/report.schema.json", &v["design"]["report"]);

    assert_eq!(run(&["prime", "--s", "1", "--pairs", "2"]).status.code(), Some(1));

    let v = json_stdout(&run(&["uniform-q", "--q", "2", "--J", "1,0.01"]));
    assert!((num(&v["spec"]["h"][0]) - 0.75).abs() < 1e-15);
    for q in v["report"]["q_profile"]["q"].as_array().unwrap() {
        assert!((num(q) - 2.0).abs() < 1e-9);
    }
}
