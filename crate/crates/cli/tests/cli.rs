use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_charp-bundles"));
    c.env_remove("CHARP_BUNDLES_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn chern_reports_c1() {
    let out = run(&["chern", "--n", "2", "--p", "2", "--a", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["config"]["q"], 2);
    assert_eq!(r["config"]["seed_source"], "default");
}

#[test]
fn non_prime_characteristic_is_a_usage_error() {
    assert_eq!(run(&["chern", "--p", "4"]).status.code(), Some(2));
    assert_eq!(run(&["chern", "--k", "9"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["chern", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn table_csv_has_header_and_rows() {
    let out = run(&["table", "--box", "1", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains(','));
    assert!(lines.count() >= 9);
}

#[test]
fn passing_suites_exit_zero() {
    for suite in ["splitting", "charp", "chi"] {
        let out = run(&["verify", "--suite", suite, "--box", "1"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stdout));
        assert_eq!(report(&out)["passed"], true);
    }
}

#[test]
fn failing_vanishing_suite_exits_one() {
    let out = run(&["verify", "--suite", "vanishing"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["passed"], false);
    assert!(!r["summary"]["failed"].as_array().unwrap().is_empty());
}

#[test]
fn seed_from_environment_is_recorded() {
    let out = bin().args(["chern"]).env("CHARP_BUNDLES_SEED", "77").output().unwrap();
    let r = report(&out);
    assert_eq!(r["config"]["seed"], 77);
    assert_eq!(r["config"]["seed_source"], "env:CHARP_BUNDLES_SEED");
    let flag = run(&["chern", "--seed", "5"]);
    assert_eq!(report(&flag)["config"]["seed_source"], "flag");
    let bad = bin().args(["chern"]).env("CHARP_BUNDLES_SEED", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn output_is_stable_for_a_fixed_config() {
    let args = ["verify", "--suite", "splitting", "--random-form", "--seed", "9", "--box", "1"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn form_file_and_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let form = dir.path().join("form.json");
    std::fs::write(&form, "[[0,1,0],[1,0,0],[0,0,1]]").unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "verify",
        "--suite",
        "splitting",
        "--box",
        "1",
        "--form-file",
        form.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r["config"]["form"]["kind"], "file");

    std::fs::write(&form, "[[1,0,0],[0,0,0],[0,0,1]]").unwrap();
    let singular = run(&["chern", "--form-file", form.to_str().unwrap()]);
    assert_eq!(singular.status.code(), Some(2));
    std::fs::write(&form, "[[1,0],[0,1]]").unwrap();
    assert_eq!(run(&["chern", "--form-file", form.to_str().unwrap()]).status.code(), Some(2));
}
