use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

const CONFIG: &str = r#"{
    "roles": {"n": 7, "m": 2},
    "rule": {"kind": "median"},
    "attack": {"kind": "none"},
    "trainer": {"learning_rate": 0.2, "local_epochs": 1, "batch_size": 16},
    "partition": {"rho": 0.7},
    "data": {"source": "synthetic", "classes": 3, "features": 4, "per_class": 40, "separation": 2.0},
    "rounds": 5,
    "seed": 5
}"#;

fn dfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dfl"))
        .args(args)
        .env_remove("DFL_SEED")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn missing_config_exits_1_naming_path() {
    let out = dfl(&["run", "/nonexistent/cfg.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/cfg.json"));
}

#[test]
fn malformed_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &CONFIG.replace("\"rounds\": 5", "\"rounds\": \"five\""));
    let out = dfl(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));
}

#[test]
fn threat_model_violation_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &CONFIG.replace("\"n\": 7, \"m\": 2", "\"n\": 2, \"m\": 1"));
    let out = dfl(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("threat model"), "{}", stderr(&out));
}

#[test]
fn no_attack_run_has_zero_gap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out_dir = dir.path().join("out");
    let out = dfl(&["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(out_dir.join("records.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert_eq!(row.split(',').nth(3), Some("0.000000"));
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["seed"], 5);
    assert_eq!(summary["rounds"], 5);
}

#[test]
fn seed_flag_beats_env_beats_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let seed_of = |extra: &[&str], env: Option<&str>| {
        let out_dir = dir.path().join(format!("o{}{}", extra.len(), env.unwrap_or("")));
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_dfl"));
        cmd.args(["run", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()])
            .args(extra);
        cmd.env_remove("DFL_SEED");
        if let Some(v) = env {
            cmd.env("DFL_SEED", v);
        }
        assert!(cmd.output().unwrap().status.success());
        let summary: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
        summary["config"]["seed"].as_u64().unwrap()
    };
    assert_eq!(seed_of(&[], None), 5);
    assert_eq!(seed_of(&[], Some("11")), 11);
    assert_eq!(seed_of(&["--seed", "12"], Some("11")), 12);
}

#[test]
fn sweep_writes_cells_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &CONFIG.replace("{\"kind\": \"none\"}", "{\"kind\": \"selfish\"}"),
    );
    let out_dir = dir.path().join("sweep");
    let out = dfl(&[
        "sweep",
        cfg.to_str().unwrap(),
        "--param",
        "lambda",
        "--values",
        "0,0.5,1",
        "--repeats",
        "1",
        "--jobs",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("sweep_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["parameter"], "lambda");
    assert_eq!(summary["values"].as_array().unwrap().len(), 3);
    assert_eq!(summary["mean_gap"].as_array().unwrap().len(), 3);
    assert!(out_dir.join("lambda_0.5_r0.csv").exists());
}

#[test]
fn unknown_sweep_parameter_lists_names() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dfl(&["sweep", cfg.to_str().unwrap(), "--param", "gamma", "--values", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    for name in [
        "lambda",
        "rho",
        "selfish_fraction",
        "epsilon",
        "interval",
        "num_clients",
    ] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn verify_smoke_run() {
    let start = Instant::now();
    let out = dfl(&["verify", "--trials", "100"]);
    assert!(start.elapsed() < Duration::from_secs(5));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 4, "{stdout}");
}
