//! End-to-end tests of the rulemon binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn rulemon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rulemon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rulemon-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn check_clean_fixture_exits_zero_with_zero_metrics() {
    let out = tempdir("clean");
    let output = rulemon(&[
        "check",
        "--map",
        fixture("motorway.json").to_str().unwrap(),
        "--traj",
        fixture("clean.csv").to_str().unwrap(),
        "--rules",
        "all",
        "--out",
        out.to_str().unwrap(),
        "--fail-on-violation",
    ]);
    assert!(output.status.success(), "{output:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    for (_, rule) in report["rules"].as_object().unwrap() {
        assert_eq!(rule["once_per_agent"], 0.0);
        assert_eq!(rule["per_time_total"], 0.0);
        assert!(rule["violations"].as_array().unwrap().is_empty());
    }
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn check_tailgate_fixture_reports_and_fails() {
    let out = tempdir("tailgate");
    let output = rulemon(&[
        "check",
        "--map",
        fixture("motorway.json").to_str().unwrap(),
        "--traj",
        fixture("tailgate.csv").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--fail-on-violation",
    ]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let sd = &report["rules"]["safe_distance"];
    assert!(sd["per_time_total"].as_f64().unwrap() > 0.0);
    assert_eq!(sd["per_time_total"], sd["per_time_premise"]);
    assert_eq!(sd["flagged_agents"], serde_json::json!([1]));
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn check_unknown_rule_is_an_error() {
    let output = rulemon(&[
        "check",
        "--map",
        fixture("motorway.json").to_str().unwrap(),
        "--traj",
        fixture("clean.csv").to_str().unwrap(),
        "--rules",
        "no_such_rule",
    ]);
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr).into_owned();
    assert!(err.contains("unknown rule"), "{err}");
}

#[test]
fn check_zipper_fixture_flags_the_blocker() {
    let out = tempdir("zipper");
    let output = rulemon(&[
        "check",
        "--map",
        fixture("merge.json").to_str().unwrap(),
        "--traj",
        fixture("zipper_blocked.csv").to_str().unwrap(),
        "--rules",
        "zipper_merge",
        "--param",
        "delta_rem=55",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(
        report["rules"]["zipper_merge"]["flagged_agents"],
        serde_json::json!([1])
    );
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn compile_reports_state_count() {
    let output = rulemon(&["compile", "G a"]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("2 states"), "{}", stdout(&output));
}

#[test]
fn compile_rule_dump_round_trips() {
    let out = tempdir("compile");
    let path = out.join("rule.txt");
    let output = rulemon(&[
        "compile",
        "--rule",
        "no_right_passing",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let first = std::fs::read_to_string(&path).unwrap();
    // a second compile is byte-identical
    rulemon(&[
        "compile",
        "--rule",
        "no_right_passing",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(first, std::fs::read_to_string(&path).unwrap());
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn compile_parse_error_exits_one() {
    let output = rulemon(&["compile", "a U"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("syntax error"));
}

#[test]
fn eval_globally_fixture() {
    let dir = tempdir("eval");
    let all_true = dir.join("true.csv");
    std::fs::write(&all_true, "a\n1\n1\n1\n").unwrap();
    let output = rulemon(&["eval", "G a", "--trace", all_true.to_str().unwrap()]);
    assert!(stdout(&output).contains("satisfied"), "{}", stdout(&output));

    let with_gap = dir.join("gap.csv");
    std::fs::write(&with_gap, "a\n1\n0\n1\n").unwrap();
    let output = rulemon(&["eval", "G a", "--trace", with_gap.to_str().unwrap()]);
    assert!(
        stdout(&output).contains("violated at position 1"),
        "{}",
        stdout(&output)
    );
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn eval_being_overtaken_labels() {
    let output = rulemon(&[
        "eval",
        "G (right_ij & near_ij -> !accelerate_i)",
        "--trace",
        fixture("overtaken_labels.csv").to_str().unwrap(),
    ]);
    assert!(
        stdout(&output).contains("violated at position 3"),
        "{}",
        stdout(&output)
    );
}

#[test]
fn eval_missing_atom_column_is_an_error() {
    let dir = tempdir("eval-missing");
    let path = dir.join("trace.csv");
    std::fs::write(&path, "a\n1\n").unwrap();
    let output = rulemon(&["eval", "G (a & b)", "--trace", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("no column for atom `b`"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn labels_subcommand_dumps_csv() {
    let out = tempdir("labels");
    let output = rulemon(&[
        "labels",
        "--map",
        fixture("motorway.json").to_str().unwrap(),
        "--traj",
        fixture("tailgate.csv").to_str().unwrap(),
        "--rules",
        "safe_distance",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let labels = std::fs::read_to_string(out.join("labels.csv")).unwrap();
    assert!(labels.starts_with("frame,tuple,proposition,value\n"));
    // the tailgating follower has sd_front false at frame 0
    assert!(labels.contains("0,1,sd_front_i,0"), "{labels}");
    assert!(labels.contains("0,2,sd_front_i,1"), "{labels}");
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn worker_count_env_var_is_honored() {
    let out = tempdir("env-workers");
    let output = Command::new(env!("CARGO_BIN_EXE_rulemon"))
        .env("RULEMON_WORKERS", "2")
        .args([
            "check",
            "--map",
            fixture("motorway.json").to_str().unwrap(),
            "--traj",
            fixture("clean.csv").to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .expect("binary runs");
    assert!(output.status.success(), "{output:?}");
    std::fs::remove_dir_all(&out).ok();
}

#[test]
fn config_file_provides_defaults_and_flags_override() {
    let dir = tempdir("config");
    let config = dir.join("run.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "map": fixture("motorway.json"),
            "trajectories": fixture("clean.csv"),
            "rules": ["safe_distance"],
            "out": dir.join("from-config"),
        })
        .to_string(),
    )
    .unwrap();
    // config alone
    let output = rulemon(&["check", "--config", config.to_str().unwrap()]);
    assert!(output.status.success(), "{output:?}");
    assert!(dir.join("from-config/report.json").exists());
    // flag overrides the config's trajectory with the tailgate file
    let override_out = dir.join("overridden");
    let output = rulemon(&[
        "check",
        "--config",
        config.to_str().unwrap(),
        "--traj",
        fixture("tailgate.csv").to_str().unwrap(),
        "--out",
        override_out.to_str().unwrap(),
        "--fail-on-violation",
    ]);
    assert_eq!(output.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}
