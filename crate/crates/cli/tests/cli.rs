use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn gsqg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsqg"))
        .args(args)
        .env("GSQG_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn small_sqg() -> Value {
    json!({
        "preset": "sqg", "kappa": 1.0, "alpha": 0.5, "grid": {"n": 32},
        "t_end": 0.2, "cadence": 0.1,
        "initial": {"kind": "single_mode", "m1": 1, "m2": 0}
    })
}

#[test]
fn run_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &small_sqg());
    let out_dir = dir.path().join("run");
    let out = gsqg(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout_json(&out)["status"], "completed");
    for f in ["config.json", "diagnostics.ndjson", "summary.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let lines = fs::read_to_string(out_dir.join("diagnostics.ndjson")).unwrap();
    assert_eq!(lines.lines().count(), 3);

    let out = gsqg(&["analyze", "--dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["monotonicity"]["lp_2"]["nonincreasing"], true);
    assert!(out_dir.join("csv").join("lp_2.csv").exists());
    assert!(out_dir.join("analysis.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("x");
    let out_dir = out_dir.to_str().unwrap();

    let mut conflict = small_sqg();
    conflict["P"] = json!({"family": "identity"});
    let cfg = write_config(dir.path(), "conflict.json", &conflict);
    let out = gsqg(&["run", "--config", &cfg, "--out", out_dir]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains('P'));

    let mut unknown = small_sqg();
    unknown["viscosity"] = json!(1.0);
    let cfg = write_config(dir.path(), "unknown.json", &unknown);
    assert_eq!(
        gsqg(&["run", "--config", &cfg, "--out", out_dir])
            .status
            .code(),
        Some(2)
    );

    let missing = dir.path().join("missing.json");
    let out = gsqg(&[
        "run",
        "--config",
        missing.to_str().unwrap(),
        "--out",
        out_dir,
    ]);
    assert_eq!(out.status.code(), Some(4));

    let out = gsqg(&[
        "analyze",
        "--dir",
        dir.path().join("nowhere").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));

    let mut tight = small_sqg();
    tight["grad_budget"] = json!(1000.0);
    let cfg = write_config(dir.path(), "tight.json", &tight);
    let out = gsqg(&["run", "--config", &cfg, "--out", out_dir]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout_json(&out)["status"], "under_resolved");
}

#[test]
fn gate_prints_verdict_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_sqg();
    cfg["preset"] = json!("log_euler");
    let path = write_config(dir.path(), "le.json", &cfg);
    let out = gsqg(&["gate", "--config", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["regime"], "log_euler_corollary");

    let path = write_config(dir.path(), "sqg.json", &small_sqg());
    let out = gsqg(&["gate", "--config", &path, "--s", "2", "--A", "linear"]);
    assert_eq!(stdout_json(&out)["regime"], "modified_sqg_open");

    let out = gsqg(&["gate", "--config", &path, "--A", "cubic:2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn symbol_and_bounds_verbs() {
    let out = gsqg(&["check-symbol", "--P", "identity", "--j-max", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["nondecreasing_ok"], true);
    assert!(v["report"]["smoothness_ratio"].as_f64().unwrap() <= 1.0 + 1e-9);

    let out = gsqg(&["check-symbol", "--P", "power:-1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = gsqg(&[
        "verify-bounds",
        "--P",
        "power:1",
        "--trials",
        "2",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["ratio2_q2_max"].as_f64().unwrap() <= 1.0 + 1e-12);
}

#[test]
fn sweep_writes_index() {
    let dir = tempfile::tempdir().unwrap();
    let mut base = small_sqg();
    base.as_object_mut().unwrap().remove("preset");
    base["P"] = json!({"family": "power", "beta": 1.0});
    base["t_end"] = json!(0.1);
    let spec = json!({
        "base": base,
        "axes": [{"path": "alpha", "values": [0.3, 0.5, 0.7, 0.5]}],
        "max_parallel": 2
    });
    let spec_path = write_config(dir.path(), "sweep.json", &spec);
    let out_dir = dir.path().join("sweep");
    let out = gsqg(&[
        "sweep",
        "--spec",
        &spec_path,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = stdout_json(&out);
    assert_eq!(
        (summary["runs"].as_u64(), summary["deduplicated"].as_u64()),
        (Some(3), Some(1))
    );
    let index = fs::read_to_string(out_dir.join("index.ndjson")).unwrap();
    let rows: Vec<Value> = index
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let regimes: Vec<&str> = rows.iter().map(|r| r["regime"].as_str().unwrap()).collect();
    assert_eq!(
        regimes,
        ["supercritical_open", "modified_sqg_open", "theorem_covered"]
    );
    for r in &rows {
        let hash = r["hash"].as_str().unwrap();
        assert_eq!(hash.len(), 16);
        assert!(out_dir.join(hash).join("diagnostics.ndjson").exists());
    }
}
