//! The command-line interface, in process and as a binary.

use std::path::PathBuf;
use std::process::Command;

use qstar::cli::{run, EXIT_BUDGET, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK};
use serde_json::Value;

fn dataset(level: u64) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/datasets").join(format!("{level}.json")).display().to_string()
}

fn qstar(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["qstar"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn derive_equation_checks_the_table() {
    let (code, out, _) = qstar(&["derive-equation", &dataset(67), "--check-table"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["a"], serde_json::json!(["9", "-14", "9", "-6", "6", "-4"]));
    assert_eq!(v["check"]["status"], "match");
    assert!(v["extra_verified"].as_str().unwrap().parse::<u64>().unwrap() >= 10);

    let (code, out, _) = qstar(&["derive-equation", &dataset(170), "--check-table"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["check"]["status"], "translated");
    assert_eq!(v["check"]["translation"], "2");
}

#[test]
fn corrupted_dataset_is_a_mismatch() {
    let text = std::fs::read_to_string(dataset(67)).unwrap();
    let mut v = json(&text);
    // Change one coefficient of h1 well inside the verified range.
    v["h1"][20] = Value::String("1000".into());
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("67.json");
    std::fs::write(&p, v.to_string()).unwrap();
    let (code, _, err) = qstar(&["derive-equation", p.to_str().unwrap(), "--check-table"]);
    assert_eq!(code, EXIT_MISMATCH, "{err}");
}

#[test]
fn malformed_and_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\"format\": 1, \"level\": 67").unwrap();
    assert_eq!(qstar(&["derive-equation", p.to_str().unwrap()]).0, EXIT_INPUT);
    assert_eq!(qstar(&["derive-equation", "/nonexistent/67.json"]).0, EXIT_INPUT);
    assert_eq!(qstar(&["no-such-command"]).0, EXIT_INPUT);
    assert_eq!(qstar(&["search-points", "--level", "11"]).0, EXIT_INPUT);
    assert_eq!(qstar(&["identify-cm", "--minpoly", "2 1"]).0, EXIT_INPUT);
    assert_eq!(qstar(&["search-points", "--equation", "1,2,3"]).0, EXIT_INPUT);
}

#[test]
fn truncated_dataset_exceeds_the_budget() {
    let text = std::fs::read_to_string(dataset(67)).unwrap();
    let mut v = json(&text);
    v["h1"].as_array_mut().unwrap().truncate(39);
    v["h2"].as_array_mut().unwrap().truncate(38);
    v["precision"] = Value::from(40);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("67.json");
    std::fs::write(&p, v.to_string()).unwrap();
    let (code, _, err) = qstar(&["pipeline", p.to_str().unwrap(), "--point", "inf-"]);
    assert_eq!(code, EXIT_BUDGET, "{err}");
}

#[test]
fn large_levels_need_the_flag() {
    let (code, _, err) = qstar(&["pipeline", &dataset(390), "--point", "0,1"]);
    assert_eq!(code, EXIT_BUDGET);
    assert!(err.contains("--allow-large"));
}

#[test]
fn pipeline_at_the_cusp_is_rejected() {
    assert_eq!(qstar(&["pipeline", &dataset(67), "--point", "inf+"]).0, EXIT_INPUT);
    assert_eq!(qstar(&["pipeline", &dataset(67), "--point", "5,5"]).0, EXIT_INPUT);
}

#[test]
fn pipeline_reports_for_67() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("67.out.json");
    let (code, _, err) = qstar(&[
        "--jobs",
        "1",
        "pipeline",
        &dataset(67),
        "--point",
        "inf-",
        "--point",
        "2,1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v = json(&std::fs::read_to_string(&out).unwrap());
    let reports = v["data"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    let f = &reports[0]["factors"][0];
    assert_eq!(f["multiplicity"], "2");
    assert_eq!(f["cm_discriminant"], "-11");
    assert_eq!(f["j"], "-32768");
    assert_eq!(reports[1]["factors"][0]["cm_discriminant"], "-43");
    assert!(v["timing"]["express_ms"].is_string());
}

#[test]
fn express_j_lists_both_expressions() {
    let (code, out, _) = qstar(&["express-j", &dataset(67)]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["expressions"].as_array().unwrap().len(), 2);
}

#[test]
fn search_points_text_and_json() {
    let (code, out, _) = qstar(&["search-points", "--level", "67"]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.contains("provably complete"));
    assert_eq!(out.lines().count(), 1 + 10);

    let (code, out, _) = qstar(&["search-points", "--level", "85", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["provably_complete"], true);
    assert_eq!(v["points"].as_array().unwrap().len(), 12);

    let (code, out, _) = qstar(&["search-points", "--equation", "9,-14,9,-6,6,-4", "--height", "5"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("(2,-1)"));
}

#[test]
fn identify_cm_commands() {
    let (code, out, _) = qstar(&["identify-cm", "--minpoly", "1 -54000"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["discriminant"], "-12");
    let (code, out, _) = qstar(&["identify-cm", "--minpoly", "1 -1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["result"], "no CM match");
    let (_, out, _) = qstar(&["identify-cm", "--minpoly", "1,-1264000,-681472000"]);
    assert_eq!(json(&out)["discriminant"], "-20");
}

#[test]
fn validate_all_is_consistent() {
    let (code, out, _) = qstar(&["validate-all"]);
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    assert_eq!(v["all_consistent"], true);
    assert_eq!(v["levels"].as_array().unwrap().len(), 36);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qstar");
    let ok = Command::new(bin).args(["identify-cm", "--minpoly", "1 884736000"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("-43"));
    let bad = Command::new(bin).args(["pipeline", "/nonexistent"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
    assert!(!bad.stderr.is_empty());
}
