use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use growthlab::analysis::{self, FitMode};
use growthlab::cli::{self, ExperimentConfig};
use growthlab::families;
use growthlab::orbit::{self, GrowthOptions};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_growthlab"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let id = write(dir.path(), "id.json", r#"{"family": {"kind": "identity"}}"#);
    assert_eq!(code(&run(&["validate", "--config", id.to_str().unwrap()])), 0);

    let bad = write(dir.path(), "bad.json", r#"{"family": {"kind": "hyperbolic", "c": 1.5}}"#);
    let out = run(&["validate", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["min_derivative"].as_f64().unwrap() < 0.0);

    let truncated = write(dir.path(), "cut.json", r#"{"family": {"kind": "#);
    assert_eq!(code(&run(&["validate", "--config", truncated.to_str().unwrap()])), 2);

    let unknown = write(dir.path(), "unknown.json", r#"{"family": {"kind": "identity"}, "typo": 1}"#);
    assert_eq!(code(&run(&["validate", "--config", unknown.to_str().unwrap()])), 2);
}

#[test]
fn growth_identity_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "id.json", r#"{"family": {"kind": "identity"}, "n_max": 100, "checkpoints": [1, 10, 100]}"#);
    let out_path = dir.path().join("id.csv");
    let out = run(&["growth", "--config", cfg.to_str().unwrap(), "--grid", "64", "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], cli::CSV_HEADER.join(","));
    assert_eq!(lines.len(), 4);
    assert!(!text.contains('\r'));
    let (ns, gs) = cli::read_growth_csv(&out_path).unwrap();
    assert_eq!(ns, vec![1, 10, 100]);
    assert!(gs.iter().all(|&g| g == 0.0));
    let mut meta = out_path.into_os_string();
    meta.push(".meta.json");
    assert!(Path::new(&meta).exists());
}

#[test]
fn growth_matches_library_and_fit_round_trips() {
    let dir = TempDir::new().unwrap();
    let cfg_text = r#"{
        "family": {"kind": "conjugated-translation", "c": 1.0},
        "n_max": 2000,
        "checkpoints": "logspaced:12",
        "grid_size": 256
    }"#;
    let cfg_path = write(dir.path(), "conj.json", cfg_text);
    let out_path = dir.path().join("conj.csv");
    let out = run(&["growth", "--config", cfg_path.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let cfg = ExperimentConfig::load(&cfg_path).unwrap();
    let spec = families::conjugated_translation(1.0);
    let cps = cfg.checkpoints.resolve(cfg.n_max);
    let curve = orbit::growth_sequence_with(&spec, cfg.n_max, &cps, &GrowthOptions::with_grid(256)).unwrap();
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), cli::curve_to_csv(&curve));

    let in_memory = analysis::fit_exponent(&curve, FitMode::Power, (10, 2000)).unwrap();
    let fit = run(&["fit", "--input", out_path.to_str().unwrap(), "--mode", "power", "--window", "10:2000"]);
    assert_eq!(code(&fit), 0);
    let from_csv: analysis::ExponentFit = serde_json::from_slice(&fit.stdout).unwrap();
    assert_eq!(from_csv, in_memory);

    let narrow = run(&["fit", "--input", out_path.to_str().unwrap(), "--window", "1000:1100"]);
    assert_eq!(code(&narrow), 1);
}

#[test]
fn classify_reports_strata() {
    let dir = TempDir::new().unwrap();
    let hyp = write(dir.path(), "h.json", r#"{"family": {"kind": "hyperbolic", "c": 0.5}}"#);
    let out = run(&["classify", "--config", hyp.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((report["V"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-9);
    let points = report["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    assert!(points.iter().all(|p| p["stratum"] == "e1"));

    let id = write(dir.path(), "id.json", r#"{"family": {"kind": "identity"}}"#);
    let out = run(&["classify", "--config", id.to_str().unwrap()]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["fixed_intervals"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let conj = write(dir.path(), "c.json", r#"{"family": {"kind": "conjugated-translation", "c": 0.1}}"#);
    assert_eq!(code(&run(&["verify", "--lemma", "pr3", "--config", conj.to_str().unwrap()])), 0);
    assert_eq!(code(&run(&["verify", "--lemma", "xx"])), 2);
    assert_eq!(code(&run(&["verify", "--lemma", "eq741"])), 0);
}

#[test]
fn worker_variable_is_validated() {
    let out = bin().args(["family-list"]).env(cli::WORKERS_ENV, "zero").output().unwrap();
    assert_eq!(code(&out), 2);
    let out = bin().args(["family-list"]).env(cli::WORKERS_ENV, "2").output().unwrap();
    assert_eq!(code(&out), 0);
    let kinds = String::from_utf8(out.stdout).unwrap();
    assert_eq!(kinds.lines().count(), 9);
}

#[test]
fn output_is_byte_identical_across_worker_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "poly.json",
        r#"{"family": {"kind": "polynomial-flat", "k": 2, "c": 1.0}, "n_max": 3000, "checkpoints": "logspaced:8", "grid_size": 512}"#,
    );
    let max = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(3);
    let mut outputs = Vec::new();
    for workers in [1, 2, max] {
        let out = bin()
            .args(["growth", "--config", cfg.to_str().unwrap()])
            .env(cli::WORKERS_ENV, workers.to_string())
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}
