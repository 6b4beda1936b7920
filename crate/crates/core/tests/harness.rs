use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use twi::harness::{
    load_config, parse_config, run_experiment, ExperimentConfig, HarnessError, RunOptions, EXIT_CONFIG, EXIT_IO,
    EXIT_RUNTIME,
};

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn shipped_configs() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(config_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    v.sort();
    v
}

#[test]
fn shipped_configs_round_trip() {
    let configs = shipped_configs();
    assert!(configs.len() >= 8);
    for path in configs {
        let cfg = load_config(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = parse_config(&cfg.to_json(), "serialized").unwrap();
        assert_eq!(cfg, again, "{}", path.display());
    }
}

fn small(path: &str, out: &Path) -> ExperimentConfig {
    let mut cfg = load_config(config_dir().join(path)).unwrap();
    cfg.trials = cfg.trials.min(20_000);
    cfg.output_path = out.display().to_string();
    cfg
}

#[test]
fn repeated_runs_write_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["chain_sweep.json", "fanout.json", "bounds_tail.json", "analytic.json"] {
        let a = run_experiment(&small(name, &dir.path().join("a")), &RunOptions { threads: Some(1) }).unwrap();
        let first = fs::read(&a.csv_path).unwrap();
        let b = run_experiment(&small(name, &dir.path().join("b")), &RunOptions { threads: Some(3) }).unwrap();
        assert_eq!(first, fs::read(&b.csv_path).unwrap(), "{name}");
        assert!(!first.contains(&b'\r'));
    }
}

#[test]
fn manifest_records_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small("plan.json", dir.path());
    let report = run_experiment(&cfg, &RunOptions::default()).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report.manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["kind"], "plan");
    assert_eq!(manifest["rows"], 3);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["wall_time_secs"].as_f64().unwrap() >= 0.0);
    assert!(manifest.get("git_describe").is_some());
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = small("plan.json", &blocker.join("sub"));
    let err = run_experiment(&cfg, &RunOptions::default()).unwrap_err();
    assert_eq!(err.exit_code(), EXIT_IO);
    assert!(err.to_string().contains("file"), "{err}");
}

#[test]
fn error_categories() {
    assert_eq!(parse_config("{", "x").unwrap_err().exit_code(), EXIT_CONFIG);
    let missing = load_config("/nonexistent/config.json").unwrap_err();
    assert!(matches!(missing, HarnessError::Io { .. }));
    let runtime: HarnessError = twi::Error::Domain("x".into()).into();
    assert_eq!(runtime.exit_code(), EXIT_RUNTIME);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_twi")).args(args).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let out = out.to_str().unwrap();
    let plan = config_dir().join("plan.json");
    let plan = plan.to_str().unwrap();

    let ok = cli(&["--out", out, "plan", plan]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(Path::new(out).join("results.csv").exists());

    // a plan config handed to the simulate subcommand
    assert_eq!(cli(&["--out", out, "simulate", plan]).status.code(), Some(EXIT_CONFIG));

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"schema_version": 1, "kind": "plan", "t_model": {"type": "constant", "value": -1}, "windows": [0.1]}"#)
        .unwrap();
    let res = cli(&["plan", bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&res.stderr).contains("t_model"));

    assert_eq!(cli(&["plan", "/nonexistent.json"]).status.code(), Some(EXIT_IO));
    assert_eq!(cli(&["--trials", "0", "--out", out, "reproduce", "--figure", "7"]).status.code(), Some(EXIT_CONFIG));
}

#[test]
fn cli_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, sub: &str| {
        let out = dir.path().join(sub);
        let status = cli(&[
            "--seed", "42", "--trials", "30000", "--threads", threads, "--out", out.to_str().unwrap(),
            "sweep", config_dir().join("chain_sweep.json").to_str().unwrap(),
        ]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["seed"], 42);
        assert_eq!(manifest["trials"], 30000);
        fs::read(out.join("results.csv")).unwrap()
    };
    assert_eq!(run("1", "a"), run("2", "b"));
}
