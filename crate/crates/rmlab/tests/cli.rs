use std::process::{Command, Output};

use serde_json::Value;

fn rmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmlab")).args(args).env_remove("RMLAB_PRECISION").output().unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = rmlab(args);
    (serde_json::from_slice(&out.stdout).unwrap(), out.status.code().unwrap())
}

#[test]
fn unit_of_five() {
    let (v, code) = json(&["unit", "-d", "5"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "unit");
    assert_eq!(v["result"]["unit"], "(1+√5)/2");
    assert_eq!(v["result"]["norm"], -1);
    assert_eq!(v["result"]["totally_positive"], "(3+√5)/2");
}

#[test]
fn pentagon_and_reduce() {
    let (v, code) = json(&["pentagon", "--ndeg", "4", "--mu", "q"]);
    assert_eq!((code, v["result"]["residual"].as_str()), (0, Some("0")));
    let (v, code) = json(&["reduce", "--theta", "1 1 5 /2"]);
    assert_eq!((code, v["result"]["cf"].as_str()), (0, Some("[1; (1)]")));
}

#[test]
fn output_is_deterministic() {
    for args in [&["stark"][..], &["qtheta", "--radius", "3"], &["zeta", "--s", "2", "--mellin"]] {
        let a = rmlab(args);
        let b = rmlab(args);
        assert!(a.status.success(), "{:?}", args);
        assert_eq!(a.stdout, b.stdout, "{:?}", args);
    }
}

#[test]
fn input_errors_exit_two() {
    let (v, code) = json(&["unit", "-d", "4"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "input");
    assert_eq!(rmlab(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(rmlab(&["--json", "--table", "unit", "-d", "5"]).status.code(), Some(2));
}

#[test]
fn precision_rounds_floats() {
    let out = Command::new(env!("CARGO_BIN_EXE_rmlab")).args(["stark"]).env("RMLAB_PRECISION", "5").output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["stark"]["s0"].as_f64(), Some(3.8909));
}

#[test]
fn table_format_is_flat() {
    let out = rmlab(&["--table", "unit", "-d", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "result.norm = -1"), "{}", text);
}
