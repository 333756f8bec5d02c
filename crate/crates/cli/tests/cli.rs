use std::process::{Command, Output};

fn piupto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_piupto")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn equiv_examples() {
    let o = piupto(&["equiv", "--mode", "strong", "tau.0|tau.0", "tau.tau.0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "EQUIVALENT");
    let o = piupto(&["equiv", "--mode", "weak", "tau.a.0 + b.0", "a.0 + b.0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), "NOT EQUIVALENT");
    let o = piupto(&["equiv", "--mode", "weak", "tau.a.0", "a.0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(piupto(&["equiv", "a<b", "0"]).status.code(), Some(2));
    assert_eq!(piupto(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(piupto(&["upto", "nonsense(", "0", "0"]).status.code(), Some(2));
    assert_eq!(piupto(&["lookahead", "claims", "--op", "op9"]).status.code(), Some(2));
}

#[test]
fn repro_damien_passes() {
    let o = piupto(&["--json", "repro-damien"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["result"]["consequence"]["holds"], false);
    assert!(v["result"]["steps"].as_array().unwrap().len() >= 4);
}

#[test]
fn acp_and_typecheck() {
    assert_eq!(piupto(&["acp", "a<b>.c(y).0"]).status.code(), Some(1));
    assert_eq!(piupto(&["acp", "a<b>.0 | c(y).0"]).status.code(), Some(0));
    let o = piupto(&["--json", "typecheck", "a(x).0"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["async"], true);
}

#[test]
fn compat_report_shape_and_determinism() {
    let args = ["--json", "--seed", "3", "--samples", "64", "compat", "a<b>.0 | c(y).0", "tau.a<b>.0"];
    let (a, b) = (piupto(&args), piupto(&args));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 3);
    for row in v["result"].as_array().unwrap() {
        for key in ["claim", "verdict", "samplingMode", "universeHash"] {
            assert!(row.get(key).is_some(), "{row}");
        }
        if row["verdict"] == "fails" {
            assert!(row.get("counterexample").is_some());
        }
    }
}

#[test]
fn lookahead_commands() {
    let o = piupto(&["--json", "lookahead", "search", "--max-size", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["result"]["witness"]["relation"].is_array());
    let o = piupto(&["--json", "lookahead", "search", "--max-size", "4", "--no-op"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["result"]["witness"].is_null());
    let o = piupto(&["lookahead", "claims", "--op", "op2", "--max-size", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&piupto(&["lookahead", "step", "op(a.a.0)"])).trim(), "op(a.a.0) --a--> 0");
}
