use std::process::{Command, Output};

use serde_json::Value;

fn pvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvlab"))
        .args(args)
        .env_remove("PVLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn strip_timing(v: &mut Value) {
    if let Some(checks) = v["checks"].as_array_mut() {
        for c in checks {
            c["wall_ms"] = Value::Null;
        }
    }
}

#[test]
fn exponents_spot_values() {
    let out = pvlab(&["exponents", "--d", "1", "--k", "2", "--p", "6/1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(r#""gamma":"1/3""#), "{text}");
    assert!(text.contains(r#""lambda0":"1/6""#), "{text}");
}

#[test]
fn missing_flag_is_usage_error() {
    let out = pvlab(&["exponents", "--d", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--k"));
}

#[test]
fn precondition_is_usage_error() {
    assert_eq!(
        pvlab(&["exponents", "--d", "1", "--k", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        pvlab(&["exponents", "--d", "1", "--k", "2", "--p", "0.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pvlab(&["iterate", "--d", "1", "--k", "2", "--p", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn identity_sweep_passes() {
    let out = pvlab(&[
        "verify",
        "--suite",
        "identities",
        "--dmax",
        "3",
        "--kmax",
        "5",
        "--pgrid",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["summary"]["fail"], 0);
    assert!(v["summary"]["pass"].as_u64().unwrap() > 10);
    for key in ["tool_version", "command", "params", "checks", "summary"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn iterate_reports_transcription_diff() {
    let v = json(&pvlab(&["iterate", "--d", "2", "--k", "4", "--p", "30"]));
    assert_eq!(v["summary"]["fail"], 0);
    assert!(!v["result"]["transcription_warning"]
        .as_array()
        .unwrap()
        .is_empty());
    let v = json(&pvlab(&["iterate", "--d", "2", "--k", "3"]));
    assert!(v["result"]["transcription_warning"]
        .as_array()
        .unwrap()
        .is_empty());
}

#[test]
fn count_csv_columns() {
    let out = pvlab(&[
        "count", "--s", "2", "--d", "1", "--k", "2", "--n", "8", "--csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,J,slope");
    assert_eq!(lines[1], "2,6,");
    assert!(lines[2].starts_with("4,28,"));
    assert!(lines[3].starts_with("8,120,"));
}

#[test]
fn count_threads_from_env() {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_pvlab"))
            .args(["count", "--s", "2", "--d", "2", "--k", "2", "--n", "4"])
            .env("PVLAB_THREADS", threads)
            .output()
            .unwrap();
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(
            v["params"]["threads"].as_u64().unwrap(),
            threads.parse::<u64>().unwrap()
        );
        v["result"]["rows"].clone()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn comb_and_blcheck_pass() {
    for args in [
        &["comb", "--suite", "frac"][..],
        &["comb", "--suite", "deficiency"],
        &["comb", "--suite", "multiplicity"],
        &["comb", "--suite", "extension"],
        &["blcheck", "--monomial-sweep"],
        &["blcheck", "--random", "3", "--dmax", "2", "--kmax", "3"],
    ] {
        let out = pvlab(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(json(&out)["summary"]["fail"], 0, "{args:?}");
    }
    assert_eq!(pvlab(&["blcheck"]).status.code(), Some(2));
}

#[test]
fn tiny_budget_guards_without_failing() {
    let args = [
        "all", "--budget", "tiny", "--dmax", "2", "--kmax", "3", "--pgrid", "2",
    ];
    let first = pvlab(&args);
    assert_eq!(first.status.code(), Some(0));
    let mut a = json(&first);
    assert_eq!(a["summary"]["fail"], 0);
    assert!(a["summary"]["guarded"].as_u64().unwrap() > 0);
    let mut b = json(&pvlab(&args));
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("pvlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = pvlab(&[
        "exponents",
        "--d",
        "2",
        "--k",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "exponents");
    std::fs::remove_dir_all(&dir).ok();
}
