use std::path::PathBuf;
use std::process::{Command, Output};

fn iwasawa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iwasawa")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    root.to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn theta_sanity_example() {
    let out = iwasawa(&["theta", "--q", "2", "--S", "inf,theta", "--Sigma", "theta+1", "--trivial-group", "--degree", "12"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("1 − u"), "{}", stdout(&out));
}

#[test]
fn theta_json_output_parses() {
    let cfg = config("flagship_q3.json");
    let out = iwasawa(&["theta", "--config", &cfg, "--n", "0", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON on stdout");
    assert!(v.is_object());
}

#[test]
fn verify_all_writes_a_passing_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = iwasawa(&["verify", "all", "--config", &config("flagship_q3.json"), "--output", report.to_str().unwrap()]);
    assert!(out.status.success(), "{}\n{}", stdout(&out), String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], serde_json::Value::Bool(true));
    assert!(v["verdicts"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn count_points_methods_agree() {
    let out = iwasawa(&["count-points", "--config", &config("flagship_q3.json"), "--n", "0", "--max-i", "4", "--method", "both"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("28") && text.contains("82"), "{text}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(iwasawa(&["theta", "--no-such-flag"]).status.code(), Some(2));
    // x^2 + 2 = (x + 1)(x + 2) over F_3.
    let out = iwasawa(&["theta", "--q", "3", "--p", "x^2+2", "--Sigma", "x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_reported() {
    let out = iwasawa(&["zeta", "--config", "/nonexistent/run.json"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}
