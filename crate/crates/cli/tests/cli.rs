//! Runs the binary and checks exit codes and report shapes.

use std::process::{Command, Output};

use serde_json::Value;

fn relgen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relgen")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn field_info_reports_the_primitive_element() {
    let out = relgen(&["field-info", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["primitive_element"], "1,1");
}

#[test]
fn exit_codes() {
    assert_eq!(relgen(&["covering", "SL(2,5)"]).status.code(), Some(0));
    assert_eq!(relgen(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(relgen(&["obstruction", "--q", "7", "--a", "2", "--b", "3", "--kmax", "3"]).status.code(), Some(2));
    assert_eq!(relgen(&["--format", "csv", "fit", "SL(2,5)"]).status.code(), Some(2));
    assert_eq!(relgen(&["covering", "SL(5,5)"]).status.code(), Some(3));
    assert_eq!(relgen(&["covering", "SL(2,6)"]).status.code(), Some(4));
    assert_eq!(relgen(&["field-info", "12"]).status.code(), Some(4));
}

#[test]
fn covering_csv_header_and_rows() {
    let out = relgen(&["--format", "csv", "covering", "SL(2,5)"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("group,element,class_size,l_pr,k"));
    // 9 classes, the two central ones skipped
    assert_eq!(lines.count(), 7);
}

#[test]
fn ctype_verdicts() {
    let v = json(&relgen(&["ctype", "cmp", "1*n^-1/2", "3*n^-1*log^1"]));
    assert_eq!(v["verdict"], "greater");
    let v = json(&relgen(&["ctype", "cmp", "0", "n^-1"]));
    assert_eq!(v["verdict"], "less");
    let v = json(&relgen(&["ctype", "ideal", "I1", "5*n^-1"]));
    assert_eq!(v["member"], true);
    assert_eq!(relgen(&["ctype", "cmp", "1*n^-2", "n^-1"]).status.code(), Some(4));
}

#[test]
fn swap_witness_checks_pass() {
    let out = relgen(&["--seed", "1", "witness", "swap", "Sp(6,3)", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["pass"] == true));
}

#[test]
fn obstruction_replays_byte_for_byte() {
    let args = ["--seed", "9", "--samples", "30", "obstruction", "--q", "11", "--a", "2", "--b", "5", "--kmax", "9"];
    let a = relgen(&args);
    let b = relgen(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["pass"], true);
    assert_eq!(v["h2_certificate"], 10);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("relgen-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("group.json");
    let out = relgen(&["--out", path.to_str().unwrap(), "group", "A(5)"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["order"], "60");
    std::fs::remove_dir_all(&dir).unwrap();
}
