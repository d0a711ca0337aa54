use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ptcubic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptcubic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn wkb_rows_and_residuals() {
    let o = ptcubic(&["wkb", "--n-max", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("n,lambda0,action_check_residual"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3);
    assert!((rows[0][1] - 1.0943).abs() < 1e-4);
    for (n, row) in rows.iter().enumerate() {
        assert_eq!(row[0], n as f64);
        assert!(row[2] < 1e-8);
    }

    let single = ptcubic(&["wkb", "--n-max", "0"]);
    assert_eq!(csv_rows(&stdout(&single)).len(), 1);
}

#[test]
fn csv_values_round_trip() {
    let text = stdout(&ptcubic(&["wkb", "--n-max", "0"]));
    let field = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let v: f64 = field.parse().unwrap();
    assert_eq!(format!("{v:.16e}"), field);
}

#[test]
fn eigen_records_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eigen.json");
    let o = ptcubic(&["eigen", "--n-max", "4", "--rel-tol", "1e-8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let records = read_json(&out);
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 4);
    assert!((records[0]["lambda"].as_f64().unwrap() - 1.1563).abs() < 1e-4);
    let fields = [
        "order_index",
        "lambda",
        "wkb_index",
        "wkb_lambda0",
        "residual_w",
        "dw_dlambda_mag",
        "simple",
        "h_phase_residual",
    ];
    for r in records {
        let obj = r.as_object().unwrap();
        assert_eq!(obj.len(), fields.len());
        for f in fields {
            assert!(obj.contains_key(f), "missing {f}");
        }
        assert_eq!(r["simple"], Value::Bool(true));
    }

    let manifest = read_json(&dir.path().join("eigen.json.manifest.json"));
    assert_eq!(manifest["command"], "eigen");
    assert_eq!(manifest["config"]["rel_tol"].as_f64(), Some(1e-8));
    assert!(manifest["version"].is_string());
    assert!(manifest["timestamp"].is_string());
    assert_eq!(manifest["input"]["eigen"]["n_max"], 4);
}

#[test]
fn eigen_rejects_zero_levels() {
    let o = ptcubic(&["eigen", "--n-max", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = ptcubic(&["grid", "--nx", "4", "--ny", "3", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn grid_shape_and_summary() {
    let o = ptcubic(&["grid", "--nx", "5", "--ny", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("re,im,abs_h,arg_h"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 15);
    assert!(rows.iter().all(|r| r[2] < 1.0 && r[1] >= 0.05));

    let summary: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(summary["max_abs_h"].as_f64().unwrap() < 1.0);
    assert_eq!(summary["argmax"].as_array().unwrap().len(), 2);
    assert!(summary["violations"].as_array().unwrap().is_empty());
}

#[test]
fn degenerate_grid_is_one_row() {
    let o = ptcubic(&["grid", "--nx", "1", "--ny", "1", "--re-min", "3", "--im-min", "0.5"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][..2], &[3.0, 0.5]);
}

#[test]
fn grid_below_floor_is_usage_error() {
    let o = ptcubic(&["grid", "--im-min", "0.01"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# coarse grid\nnx = 2\nny = 2\nrel_tol = 1e-9\n").unwrap();
    let out = dir.path().join("g.csv");
    let o = ptcubic(&[
        "grid",
        "--config",
        cfg.to_str().unwrap(),
        "--ny",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest = read_json(&dir.path().join("g.csv.manifest.json"));
    assert_eq!(manifest["config"]["nx"], 2);
    assert_eq!(manifest["config"]["ny"], 1);
    assert_eq!(manifest["config"]["rel_tol"].as_f64(), Some(1e-9));
    assert_eq!(csv_rows(&std::fs::read_to_string(&out).unwrap()).len(), 2);
}

#[test]
fn bad_config_file_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "nx = two\n").unwrap();
    let o = ptcubic(&["wkb", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains("line 1"));
}

#[test]
fn unwritable_path_is_reported() {
    let o = ptcubic(&["wkb", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["error"]["message"].as_str().unwrap().contains("cannot write"));
}

#[test]
fn f0_prints_boundary_data() {
    let o = ptcubic(&["f0", "--mu", "-1,0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let data: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(data["mu"][0].as_f64(), Some(-1.0));
    assert!(data["steps"].as_u64().unwrap() > 0);

    assert_eq!(ptcubic(&["f0", "--mu", "1"]).status.code(), Some(2));
}

#[test]
fn verify_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = ptcubic(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let table = stdout(&o);
    assert!(table.contains("K = 1.68261852639"));
    assert!(table.contains("|K - K'|"));
    let report = read_json(&out);
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() > 30);
}

#[test]
fn verify_loose_tolerance_names_failures() {
    let o = ptcubic(&["verify", "--json", "--rel-tol", "1e-2"]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["passed"], false);
    let failed: Value = serde_json::from_slice(&o.stderr).unwrap();
    let names = failed["failed"].as_array().unwrap();
    assert!(!names.is_empty());
    assert!(names.iter().any(|n| n.as_str().unwrap().starts_with("shoot.")));
}
