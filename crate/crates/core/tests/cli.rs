use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_spinquench");

const SMALL: &str = "\
[experiment]
seed = 3
shots = 4000
repetitions = 2
trajectories = 4

[model]
n_qubits = 4
steps = 3

[noise]
preset = device

[mitigation]
preset = TREX+PT
";

fn spinquench(args: &[&str], workers: &str) -> Output {
    Command::new(BIN).args(args).env("SPINQUENCH_WORKERS", workers).output().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.ini");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn missing_config_flag_is_a_usage_error() {
    let out = spinquench(&["simulate"], "1");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let out = spinquench(&["simulate", "--config", "/nonexistent/run.ini"], "1");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[model]\nn_qubits = 4\n");
    let out = spinquench(&["simulate", "--config", &cfg], "1");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("model.steps"));
}

#[test]
fn unknown_key_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[model]\nn_qubits = 4\nsteps = 2\nwidth = 3\n");
    let out = spinquench(&["simulate", "--config", &cfg], "1");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn oversized_chain_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[model]\nn_qubits = 40\nsteps = 2\n");
    let out_dir = dir.path().join("out");
    let out = spinquench(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()], "1");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn results_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (keep, workers) in [(&a, "1"), (&b, "3")] {
        let run = spinquench(&["mitigate", "--config", &cfg, "--out", out.to_str().unwrap()], workers);
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
        std::fs::rename(&out, keep).unwrap();
    }
    for file in ["results.csv", "report.json", "manifest.json", "config.ini"] {
        let x = std::fs::read(a.join(file)).unwrap();
        let y = std::fs::read(b.join(file)).unwrap();
        assert!(x == y, "{file} differs");
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("manifest.json")).unwrap()).unwrap();
    let hash = manifest["config_hash"].as_str().unwrap();
    let results = std::fs::read_to_string(a.join("results.csv")).unwrap();
    assert_eq!(results.lines().next().unwrap(), format!("# config_sha256={hash}"));
}

#[test]
fn seed_flag_changes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    spinquench(&["simulate", "--config", &cfg, "--out", a.to_str().unwrap()], "1");
    spinquench(&["simulate", "--config", &cfg, "--seed", "4", "--out", b.to_str().unwrap()], "1");
    let x = std::fs::read_to_string(a.join("results.csv")).unwrap();
    let y = std::fs::read_to_string(b.join("results.csv")).unwrap();
    assert_ne!(x, y);
}

#[test]
fn compare_checks_a_results_file_against_a_bundled_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("steps = 3", "steps = 10"));
    let out_dir = dir.path().join("run");
    let run = spinquench(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()], "1");
    assert_eq!(run.status.code(), Some(0));
    let results = out_dir.join("results.csv");
    let out = spinquench(&["compare", "--results", results.to_str().unwrap(), "--reference", "reference_n20:OBC"], "1");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("step,value,reference,abs_diff"));
    assert_eq!(text.lines().count(), 12);

    let out = spinquench(&["compare", "--results", results.to_str().unwrap(), "--reference", "nope:OBC"], "1");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compare_without_results_prints_the_summary_reproduction() {
    let out = spinquench(&["compare"], "1");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("TREX+DD+PT"));
}
