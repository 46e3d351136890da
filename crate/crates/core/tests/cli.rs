use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_riemann-factor");
const WORKED: &str = include_str!("../../../configs/worked.json");

fn run_cli(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn factorize_worked_instance() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", WORKED);
    let out = tmp.path().join("out");
    let o = run_cli(&["factorize", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert!(r["checks"]["residual"]["max_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["factorization"]["chosen"].as_array().unwrap().len(), 2);
}

#[test]
fn grid_of_unit_factor() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", r#"{"grid": {"resolution": [9, 7]}}"#);
    let out = tmp.path().join("out");
    let o = run_cli(&["grid", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("grid.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re,im,abs_R,arg_R"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(f.len(), 4);
        assert_eq!(f[2].parse::<f64>().unwrap(), 1.0);
        assert!(f[3].is_empty() || f[3].parse::<f64>().unwrap() == 0.0);
    }
}

#[test]
fn corrupted_cross_check_fails_verify() {
    let mut cfg: Value = serde_json::from_str(WORKED).unwrap();
    cfg["factorization"]["cross_check"] = serde_json::json!({
        "eta": [{ "lo": "2", "hi": "3", "value": "pi" }],
        "scale": 2.5
    });
    let tmp = tempfile::tempdir().unwrap();
    let path = write(tmp.path(), "c.json", &cfg.to_string());
    let out = tmp.path().join("out");
    let o = run_cli(&["factorize", "--config", &path, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = report(&out)["error"].as_str().unwrap().to_string();
    assert!(err.starts_with("assemble: the ratio"), "{err}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("varies by"));
}

#[test]
fn outputs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg: Value = serde_json::from_str(WORKED).unwrap();
    cfg["grid"]["resolution"] = serde_json::json!([15, 11]);
    let path = write(tmp.path(), "c.json", &cfg.to_string());
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = run_cli(&["grid", "--config", &path, "--out", dir.to_str().unwrap(), "--seed", "3"]);
        assert!(o.status.success());
    }
    for f in ["grid.csv", "report.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(report(&a)["seed"], 3);
}

#[test]
fn tolerance_override_and_warn_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", WORKED);
    let out = tmp.path().join("out");
    let o = run_cli(&["factorize", "--config", &cfg, "--out", out.to_str().unwrap(), "--tol", "residual=1e-30"]);
    assert_eq!(o.status.code(), Some(1));
    let tol = report(&out)["tolerances"]["residual"].as_f64().unwrap();
    assert!((tol / 1e-30 - 1.0).abs() < 1e-12);
    let o = run_cli(&[
        "factorize", "--config", &cfg, "--out", out.to_str().unwrap(), "--tol", "residual=1e-30", "--warn-only",
    ]);
    assert!(o.status.success());
    assert_eq!(report(&out)["passed"], false);
}

#[test]
fn malformed_config_reports_position() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "c.json", "{\n  \"seed\": oops\n}");
    let o = run_cli(&["solve", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}
