//! End-to-end runs of the `csbi` binary.

use std::process::{Command, Output};

use serde_json::Value;

const L1: &str = "-1.164e-4*(s-10)*(s+0.0625)/(s^2*(s+10))";
const L2: &str = "-5.77*(s-10)*(s+1)/(s*(s+10)*(s+1))";
const L3: &str = "-2.0348*(s-1)/(s^2+3*s+2)";
const L4: &str = "2*(z+2)/(z+0.5)";

fn csbi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csbi")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_elapsed(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("elapsed_ms");
    v
}

#[test]
fn exit_code_matrix() {
    let cases = [
        ("analyze", L1, 0),
        ("analyze", L2, 0),
        ("analyze", L3, 2),
        ("analyze", L4, 0),
        ("verify", L1, 0),
        ("verify", L2, 0),
        ("verify", L3, 0),
        ("verify", L4, 4),
        ("analyze", "abc", 1),
        ("verify", "abc", 1),
    ];
    for (cmd, tf, code) in cases {
        assert_eq!(csbi(&[cmd, tf]).status.code(), Some(code), "{cmd} {tf}");
    }
}

#[test]
fn boundary_zero_is_refused() {
    let out = csbi(&["analyze", "(s^2+1)/(s*(s+1)*(s+2))"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["analytic"]["status"], "Refused");
}

#[test]
fn syntax_error_is_structured() {
    let out = csbi(&["analyze", "abc"]);
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "SyntaxError");
    assert_eq!(err["error"]["position"], 0);
}

#[test]
fn verify_report_has_exact_top_level_keys() {
    let v = json(&csbi(&["verify", L1]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        ["input_echo", "domain", "structure", "stability", "analytic", "numeric", "crosschecks", "warnings", "elapsed_ms"]
    );
    let analyze = json(&csbi(&["analyze", L1]));
    assert!(analyze.get("numeric").is_none() && analyze.get("crosschecks").is_none());
}

#[test]
fn numbers_carry_seventeen_significant_digits() {
    let out = csbi(&["analyze", L2]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"value\": 1.3344887348353554e-2"), "{text}");
}

#[test]
fn output_is_deterministic_apart_from_timing() {
    for args in [["verify", L3], ["analyze", L4]] {
        let a = without_elapsed(json(&csbi(&args)));
        let b = without_elapsed(json(&csbi(&args)));
        assert_eq!(a, b);
    }
    let a = without_elapsed(json(&csbi(&["identities", "--count", "5", "--seed", "3"])));
    let b = without_elapsed(json(&csbi(&["identities", "--count", "5", "--seed", "3"])));
    assert_eq!(a, b);
}

#[test]
fn log_base_override_rescales() {
    let v = json(&csbi(&["analyze", L4, "--log-base", "natural"]));
    let x = v["analytic"]["value"].as_f64().unwrap();
    assert!((x - 0.415_037_499_278_843_8 * std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(v["analytic"]["log_base"], "2");
    assert_eq!(v["analytic"]["reported_log_base"], "natural");
}

#[test]
fn cancel_flag_removes_common_factor() {
    let v = json(&csbi(&["analyze", L2, "--cancel"]));
    assert_eq!(v["structure"]["poles"].as_array().unwrap().len(), 1);
    let x = v["analytic"]["value"].as_f64().unwrap();
    assert!((x - 77.0 / 5770.0).abs() < 1e-12);
}

#[test]
fn identities_sweep_and_empty_count() {
    let out = csbi(&["identities", "--count", "10", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["lemma2"]["passes"], 10);
    assert_eq!(v["lemma4"]["passes"], 10);
    assert_eq!(csbi(&["identities", "--count", "0"]).status.code(), Some(1));
}

#[test]
fn parse_echoes_structure() {
    let out = csbi(&["parse", L1]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["domain"], "continuous");
    assert_eq!(v["structure"]["integrator_count"], 2);
    assert_eq!(csbi(&["parse", "s+1)"]).status.code(), Some(1));
}

#[test]
fn text_and_csv_formats() {
    let text = String::from_utf8(csbi(&["analyze", L1, "--format", "text"]).stdout).unwrap();
    assert!(text.lines().any(|l| l == "analytic.status: Finite"), "{text}");
    let csv = String::from_utf8(csbi(&["analyze", L1, "--format", "csv"]).stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("input_echo,domain,"));
}

#[test]
fn usage_errors_are_input_errors() {
    assert_eq!(csbi(&["analyze"]).status.code(), Some(1));
    assert_eq!(csbi(&["verify", L1, "--tol", "-1"]).status.code(), Some(1));
}
