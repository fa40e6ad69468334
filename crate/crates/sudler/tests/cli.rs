use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sudler(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sudler"))
        .args(args)
        .env_remove("SUDLER_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn fixtures_path() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/calibration.json").display().to_string()
}

#[test]
fn cf_emits_json_table() {
    let out = sudler(&["cf", "--alpha", "[0;(6)]", "--K", "3"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema_version"], 1);
    let qs: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["q"].as_str().unwrap()).collect();
    assert_eq!(qs, ["1", "6", "37", "228"]);
}

#[test]
fn cf_csv_carries_schema_version() {
    let out = sudler(&["cf", "--alpha", "golden", "--K", "5", "--format", "csv"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# schema_version=1"));
    assert_eq!(lines.next(), Some("k,a,p,q,theta,delta,eta"));
    assert_eq!(lines.count(), 6);
}

#[test]
fn ostrowski_round_trips_through_the_cli() {
    let out = sudler(&["ostrowski", "--alpha", "[0;(3)]", "--n", "100"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let digits: Vec<String> = v["digits"].as_array().unwrap().iter().map(|d| d.to_string()).collect();
    let joined = digits.join(",");
    let back = sudler(&["ostrowski", "--alpha", "[0;(3)]", "--digits", &joined]);
    let w: Value = serde_json::from_str(&stdout(&back)).unwrap();
    assert_eq!(w["n"], "100");
    assert_eq!(w["valid"], true);
}

#[test]
fn ostrowski_rejects_invalid_digits() {
    let out = sudler(&["ostrowski", "--alpha", "[0;(3)]", "--digits", "1,3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("forces b_0 = 0"));
}

#[test]
fn scan_reports_argmax_near_five_sixths() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("scan.json");
    let out = sudler(&["scan", "--alpha", "[0;(6)]", "--K", "3", "--c", "2", "--out", json.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("argmax="));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["K"], 3);
    let digits: Vec<i64> = v["argmax_digits"].as_array().unwrap().iter().map(|d| d.as_i64().unwrap()).collect();
    assert!(digits.iter().all(|b| (b - 5).abs() <= 1), "{digits:?}");
}

#[test]
fn scan_writes_values_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("values.csv");
    let out = sudler(&["scan", "--alpha", "[0;(4)]", "--K", "2", "--values-csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    // q_2 = 17 rows after the two header lines.
    assert_eq!(text.lines().count(), 2 + 17);
}

#[test]
fn cotangent_csv_lists_the_grid() {
    let out = sudler(&[
        "cotangent", "--alpha", "[0;(15)]", "--k", "3", "--kind", "vk-star", "--grid", "-1.5:1.5:0.5", "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 2 + 7);
}

#[test]
fn limitfn_writes_closed_form_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = sudler(&[
        "limitfn", "--alpha", "[0;(5)]", "--k", "3", "--grid", "-0.5:0.5:0.25", "--closed-form", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().nth(1), Some("x,empirical,closed_form,two_sin"));
    assert_eq!(text.lines().count(), 2 + 5);
}

#[test]
fn bad_grid_is_a_usage_error() {
    let out = sudler(&["limitfn", "--alpha", "[0;(5)]", "--k", "3", "--grid", "0:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("lo:hi:step"));
}

#[test]
fn verify_constants_prints_the_volume() {
    let out = sudler(&["verify", "--suite", "constants", "--fixtures", &fixtures_path()]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS constants"));
    assert!(text.contains("Vol(4_1) = 2.02988"));
}

#[test]
fn verify_without_fixtures_asks_for_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.json");
    let out = sudler(&["verify", "--suite", "constants", "--fixtures", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("sudler calibrate"));
}

#[test]
fn verify_report_is_json() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = sudler(&[
        "verify", "--suite", "theorem3", "--alpha", "[0;(10)]", "--K", "3", "--fixtures", &fixtures_path(), "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["suites"][0]["suite"], "theorem3");
}

#[test]
fn verify_unknown_alpha_needs_calibration() {
    let out = sudler(&[
        "verify", "--suite", "theorem3", "--alpha", "[0;(7)]", "--K", "3", "--fixtures", &fixtures_path(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--alpha [0;(7)]"));
}

#[test]
fn figure_two_has_both_residue_classes() {
    let dir = tempfile::tempdir().unwrap();
    let out = sudler(&["figures", "--which", "fig2", "--step", "0.05", "--out-dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert_eq!(text.lines().nth(1), Some("x,k4,k4_closed,k5,k5_closed,two_sin"));
}

#[test]
fn calibration_reproduces_checked_in_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cal.json");
    let out = sudler(&["calibrate", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let fresh = std::fs::read(&path).unwrap();
    let frozen = std::fs::read(fixtures_path()).unwrap();
    assert!(fresh == frozen, "checked-in fixtures are stale; rerun `sudler calibrate`");
}

#[test]
fn precision_flag_and_env_are_honoured() {
    let out = sudler(&["--precision", "8", "cf", "--alpha", "golden"]);
    assert!(!out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_sudler"))
        .args(["cf", "--alpha", "golden", "--K", "2"])
        .env("SUDLER_PRECISION_BITS", "512")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(v["working_bits"], 512);
}
