use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bmk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bmk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("bmk-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn verify_identity_matrix_passes() {
    let out = bmk(&[
        "verify", "--m", "3", "--k", "3", "--matrix", "identity", "--cap", "8",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.ends_with("PASS\n"));
    assert_eq!(text.matches(": ok").count(), 9);
}

#[test]
fn verify_random_k2_passes() {
    let out = bmk(&[
        "verify", "--m", "3", "--k", "2", "--matrix", "random", "--seed", "7", "--cap", "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("matrix=random(seed=7)"));
}

#[test]
fn verify_symbolic_passes() {
    let out = bmk(&[
        "verify", "--m", "3", "--k", "3", "--matrix", "symbolic", "--cap", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("PASS\n"));
}

#[test]
fn verify_json_report_shape() {
    let out = bmk(&[
        "verify", "--m", "2", "--k", "2", "--matrix", "ones", "--cap", "3", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["params"]["m"], 2);
    assert_eq!(v["params"]["k"], 2);
    assert_eq!(v["cap"], 3);
    assert_eq!(v["mode"], "numeric");
    assert_eq!(v["pass"], true);
    let degrees = v["per_degree"].as_array().unwrap();
    assert_eq!(degrees.len(), 4);
    for (d, entry) in degrees.iter().enumerate() {
        assert_eq!(entry["d"], d);
        assert_eq!(entry["ok"], true);
        assert_eq!(entry["residual_terms"], 0);
    }
    assert!(v["first_failure"].is_null());
}

#[test]
fn verify_matrix_file() {
    let path = temp_file(
        "good.json",
        r#"{"m":2,"mode":"numeric","entries":[["1/2","-3"],["2","0"]]}"#,
    );
    let out = bmk(&[
        "verify",
        "--m",
        "2",
        "--k",
        "2",
        "--matrix",
        path.to_str().unwrap(),
        "--cap",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_matrix_file_names_entry() {
    let path = temp_file(
        "bad.json",
        r#"{"m":2,"mode":"numeric","entries":[["1","0"],["x/y","1"]]}"#,
    );
    let out = bmk(&[
        "verify",
        "--m",
        "2",
        "--k",
        "2",
        "--matrix",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("entry (2,1)"), "{err}");
}

#[test]
fn missing_file_and_missing_seed_are_usage_errors() {
    let out = bmk(&[
        "verify",
        "--m",
        "2",
        "--k",
        "2",
        "--matrix",
        "/nonexistent/matrix.json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = bmk(&["verify", "--m", "2", "--k", "2", "--matrix", "random"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_params_are_usage_errors() {
    assert_eq!(
        bmk(&["count", "--m", "2", "--k", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bmk(&["count", "--m", "3", "--k", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(bmk(&["verify", "--m", "3"]).status.code(), Some(2));
    assert_eq!(bmk(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn count_shows_three_methods() {
    let out = bmk(&["count", "--m", "3", "--k", "3", "--len", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text
        .lines()
        .find(|l| l.trim_start().starts_with("3 "))
        .unwrap();
    let cells: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(cells, ["3", "26", "26", "26"]);
    assert!(text.contains("methods agree"));
    assert!(!text.contains("DISAGREE"));
}

#[test]
fn count_json_tables() {
    let out = bmk(&[
        "count", "--m", "3", "--k", "3", "--len", "3", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["agree"], true);
    let tables = v["tables"].as_array().unwrap();
    let methods: Vec<&str> = tables
        .iter()
        .map(|t| t["method"].as_str().unwrap())
        .collect();
    assert_eq!(methods, ["dp", "transfer", "series"]);
    for t in tables {
        assert_eq!(t["m"], 3);
        assert_eq!(t["k"], 3);
        assert_eq!(t["variant"], "strict");
        assert_eq!(t["values"], serde_json::json!(["1", "3", "9", "26"]));
    }
}

#[test]
fn count_weak_variant() {
    let out = bmk(&[
        "count",
        "--m",
        "3",
        "--k",
        "2",
        "--len",
        "2",
        "--variant",
        "weak",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    // length 2: pairs i < j only
    assert_eq!(v["tables"][0]["values"], serde_json::json!(["1", "3", "3"]));
}

#[test]
fn normal_form_of_321() {
    let out = bmk(&["normal-form", "--m", "3", "--k", "3", "--word", "3,2,1"]);
    assert_eq!(out.status.code(), Some(0));
    let signs: Vec<char> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.trim_start().chars().next().unwrap())
        .collect();
    assert_eq!(signs, ['+', '-', '-', '+', '+']);
}

#[test]
fn normal_form_json() {
    let out = bmk(&[
        "normal-form",
        "--m",
        "3",
        "--k",
        "2",
        "--word",
        "2,1",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v, serde_json::json!([{"word": [1, 2], "coeff": "1"}]));
}

#[test]
fn normal_form_rejects_bad_letters() {
    let out = bmk(&["normal-form", "--m", "3", "--k", "3", "--word", "4,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bmk(&["normal-form", "--m", "3", "--k", "3", "--word", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bmk(&["normal-form", "--m", "3", "--k", "3", "--word", "a,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn charpoly_symbolic_2x2() {
    let out = bmk(&["charpoly", "--m", "2", "--matrix", "symbolic"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("c_0 = 1\n"));
    assert!(text.contains("c_1 = -a_1_1 - a_2_2\n"));
    assert!(text.contains("c_2 = a_1_1*a_2_2 - a_1_2*a_2_1\n"));
}

#[test]
fn series_passes_and_reports_denominator() {
    let out = bmk(&["series", "--m", "3", "--k", "3", "--cap", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("PASS"));
    let out = bmk(&[
        "series", "--m", "2", "--k", "2", "--cap", "3", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["equal"], true);
    assert_eq!(v["lhs"], v["rhs"]);
    assert_eq!(v["denominator"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &[
            "verify", "--m", "3", "--k", "2", "--matrix", "random", "--seed", "11", "--cap", "4",
            "--format", "json",
        ][..],
        &["series", "--m", "3", "--k", "2", "--cap", "4"][..],
        &["charpoly", "--m", "3", "--matrix", "random", "--seed", "5"][..],
    ] {
        assert_eq!(bmk(args).stdout, bmk(args).stdout);
    }
}
