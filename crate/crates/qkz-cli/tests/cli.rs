use std::path::PathBuf;
use std::process::{Command, Output};

fn qkz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkz")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qkz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn lemma_suite_passes() {
    let out = qkz(&["--command", "check-lemma", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["command"], "check-lemma");
    assert_eq!(r["pass"], true);
    assert!(r["max_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn qkz_check_on_two_sites() {
    let out = qkz(&["--command", "check-qkz", "--n", "2", "--l", "1", "--m", "0", "--q", "0.6", "--k", "1", "--nodes", "256"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["cases"].as_array().unwrap().len(), 4);
    assert!(r["max_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn eval_writes_one_row_per_component() {
    let path = scratch("eval.csv");
    let out = qkz(&["--command", "eval", "--n", "1", "--l", "1", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "bits,real,imag");
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1,"));

    let out = qkz(&["--command", "eval", "--n", "3", "--l", "1", "--m", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let bits: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(bits, ["001", "010", "100"]);
}

#[test]
fn reports_are_deterministic() {
    let args = ["--command", "check-theorem", "--n", "2", "--l", "2", "--seed", "3"];
    let (a, b) = (qkz(&args), qkz(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["--command", "eval", "--n", "2", "--l", "1", "--seed", "3"];
    assert_eq!(qkz(&args).stdout, qkz(&args).stdout);
}

#[test]
fn config_file_with_flag_override() {
    let path = scratch("run.json");
    std::fs::write(&path, r#"{"schema": 1, "command": "check-qkz", "n": 3, "l": 1, "m": 1, "nodes": 128, "z": "auto"}"#).unwrap();
    let out = qkz(&["--config", path.to_str().unwrap(), "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["params"]["n"], 2);
    assert_eq!(r["params"]["m"], 1);
    assert_eq!(r["cases"][0]["inputs"]["nodes"], 128);

    let explicit = scratch("explicit.json");
    std::fs::write(&explicit, r#"{"command": "eval", "n": 2, "l": 1, "z": [[1.0, 0.0], [0.0, 1.0]]}"#).unwrap();
    let r = report(&qkz(&["--config", explicit.to_str().unwrap()]));
    assert_eq!(r["z"][1], serde_json::json!([0.0, 1.0]));
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(qkz(&["--command", "check-qkz", "--n", "2", "--l", "3"]).status.code(), Some(2));
    assert_eq!(qkz(&["--n", "2"]).status.code(), Some(2));
    assert_eq!(qkz(&["--command", "no-such-check"]).status.code(), Some(2));
    let path = scratch("bad.json");
    std::fs::write(&path, r#"{"schema": 9, "command": "eval"}"#).unwrap();
    let out = qkz(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema"));
}

#[test]
fn pinched_contour_exits_3() {
    // q^{-1} z_2 = q z_1 at q = 0.6
    let path = scratch("pinch.json");
    std::fs::write(&path, r#"{"command": "eval", "n": 2, "l": 1, "z": [[1.0, 0.0], [0.36, 0.0]]}"#).unwrap();
    let out = qkz(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}
