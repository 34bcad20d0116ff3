//! End-to-end CLI behavior: exit codes, stream separation, formats, filters.

use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn dea() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dea"))
}

fn example_csv() -> String {
    format!("{}/../../data/example.csv", env!("CARGO_MANIFEST_DIR"))
}

fn temp_csv(name: &str, content: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("dea-cli-test-{name}-{}.csv", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

#[test]
fn classify_lists_statuses() {
    let out = dea().args(["classify", &example_csv()]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 9);
    for k in 0..4 {
        assert!(lines[k].starts_with(&format!("DMU{}", k + 1)));
        assert!(lines[k].ends_with("extreme-efficient"));
    }
    assert!(lines[4].ends_with(" efficient"));
    for line in &lines[5..] {
        assert!(line.ends_with("inefficient"));
    }
}

#[test]
fn classify_single_dmu() {
    let path = temp_csv("single", "dmu,in:x,out:y\nA,1,1\n");
    let out = dea()
        .args(["classify", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("extreme-efficient"));
    std::fs::remove_file(path).ok();
}

#[test]
fn missing_file_exits_1_with_stderr() {
    let out = dea()
        .args(["classify", "/nonexistent/missing.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_csv_exits_1() {
    let path = temp_csv("negative", "dmu,in:x1,in:x2,out:y\nA,1,1,1\nB,-1,2,1\n");
    let out = dea()
        .args(["analyze", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(
        stderr.contains("negative value at row 2, column in:x1"),
        "stderr: {stderr}"
    );
    std::fs::remove_file(path).ok();
}

#[test]
fn unknown_flag_exits_1() {
    let out = dea()
        .args(["analyze", &example_csv(), "--definitely-not-a-flag"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_dmu_filter_exits_1() {
    let out = dea()
        .args(["analyze", &example_csv(), "--dmu", "DMU99"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("DMU99"));
}

#[test]
fn json_report_matches_reference_rows() {
    let out = dea()
        .args([
            "analyze",
            &example_csv(),
            "--dmu",
            "DMU8",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["mode"], "both");
    assert_eq!(v["config"]["candidates"], "support");
    assert_eq!(v["config"]["big_m_policy"], "auto");
    let dmus = v["dmus"].as_array().unwrap();
    assert_eq!(dmus.len(), 1);
    let dmu8 = &dmus[0];
    assert_eq!(dmu8["name"], "DMU8");
    assert_eq!(dmu8["status"], "inefficient");
    let point = dmu8["closest"]["point"].as_array().unwrap();
    let expected = [5.0, 3.0, 1.1];
    for (got, want) in point.iter().zip(expected) {
        assert!((got.as_f64().unwrap() - want).abs() < 1e-6);
    }
    let mcrs: Vec<&str> = dmu8["closest"]["mcrs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert_eq!(mcrs, ["DMU3", "DMU4"]);
    assert!(dmu8["closest"]["eta"].as_f64().unwrap() > 0.0);
    assert!(dmu8["closest"]["hyperplane"]["u"].is_array());
    assert!(dmu8["closest"]["hyperplane"]["v"].is_array());
}

#[test]
fn furthest_mode_reports_objective_and_frs() {
    let out = dea()
        .args([
            "analyze",
            &example_csv(),
            "--mode",
            "furthest",
            "--dmu",
            "DMU9",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let dmu9 = &v["dmus"][0];
    assert!((dmu9["furthest"]["objective"].as_f64().unwrap() - 5.0).abs() < 1e-6);
    let frs: Vec<&str> = dmu9["furthest"]["maximal_frs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert_eq!(frs, ["DMU3"]);
    assert!(dmu9.get("closest").is_none());
}

#[test]
fn tiny_big_m_exits_2_with_saturation_diagnostic() {
    let out = dea()
        .args(["analyze", &example_csv(), "--big-m", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("big-M"), "stderr: {stderr}");
    // stdout still carries a complete report with error fields
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("error"));
}

#[test]
fn per_dmu_errors_surface_in_json_with_exit_2() {
    let out = dea()
        .args([
            "analyze",
            &example_csv(),
            "--big-m",
            "1",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["dmus"]
        .as_array()
        .unwrap()
        .iter()
        .any(|d| d.get("error").is_some()));
}

#[test]
fn json_round_trips_to_the_in_memory_report() {
    let out = dea()
        .args(["analyze", &example_csv(), "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let parsed: dea_cli::report::ReportDto = serde_json::from_slice(&out.stdout).unwrap();

    // rebuild the same report in-process; the re-parsed JSON must equal it
    let file = std::fs::File::open(example_csv()).unwrap();
    let ds = dea_core::load_dataset(file).unwrap();
    let report = dea_core::analyze_all(&ds, &dea_core::AnalyzeConfig::default());
    let keep: Vec<usize> = (0..ds.num_dmus()).collect();
    let rebuilt = dea_cli::report::build_dto(&ds, &report, &keep);
    assert_eq!(parsed, rebuilt);

    // numbers survive at full precision: DMU6's closest output is 14/9
    let y = parsed.dmus[5].closest.as_ref().unwrap().point[2];
    assert!((y - 14.0 / 9.0).abs() < 1e-12);
    // notes flag the DMU7 divergence
    assert!(parsed.notes.iter().any(|n| n.contains("DMU7")));
}

#[test]
fn all_efficient_candidates_flag_accepted() {
    let out = dea()
        .args([
            "analyze",
            &example_csv(),
            "--candidates",
            "all-efficient",
            "--dmu",
            "DMU9",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let mcrs: Vec<&str> = v["dmus"][0]["closest"]["mcrs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert_eq!(
        mcrs,
        ["DMU4"],
        "DMU3 must be rejected even when offered as a candidate"
    );
}

#[test]
fn csv_format_has_expected_header() {
    let out = dea()
        .args(["analyze", &example_csv(), "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let header = stdout.lines().next().unwrap();
    assert_eq!(
        header,
        "dmu,status,furthest_objective,furthest_point,maximal_frs,closest_objective,closest_point,mcrs,eta,error"
    );
    assert_eq!(stdout.lines().count(), 10);
}
