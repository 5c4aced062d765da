use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    root.join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stabctl"))
        .args(args)
        .output()
        .expect("stabctl runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn scratch(name: &str, contents: &str) -> String {
    let path = std::env::temp_dir().join(format!("stabctl-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn chambers_of_the_one_wall_scenario() {
    let out = run(&["--scenario", &scenario("one_wall.json"), "chambers"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["count"], 3);
    assert_eq!(v["walls"][0]["normal"], serde_json::json!([1, -1]));
    let signs: Vec<&str> = v["chambers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["signs"][0].as_str().unwrap())
        .collect();
    assert_eq!(signs, ["-", "0", "+"]);
}

#[test]
fn split_on_the_command_line() {
    let out = run(&["approx", "split", "--tau", "1", "--theta", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["lambda"], "4");
    assert_eq!(v["sigma"], "2/3");
    assert_eq!(v["sigma_prime"], "1/12");
    assert_eq!(v["verification"], "ok");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["approx", "split", "--tau", "1", "--theta", "2", "--lambda", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["--scenario", "/nonexistent/x.json", "chambers"]).status.code(), Some(2));

    let outside = scratch(
        "outside.json",
        r#"{"schema": 1, "tensors": [{"name": "q", "example": "P1xP1"}],
            "omega": {"omega": [1, "5√2"], "candidates": [[1, 1], [1, 2], [2, 1]]}}"#,
    );
    assert_eq!(run(&["--scenario", &outside, "approx", "omega"]).status.code(), Some(3));
}

#[test]
fn csv_output() {
    let out = run(&["--scenario", &scenario("one_wall.json"), "--format", "csv", "locate"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "sigma,signs");
    assert_eq!(lines.len(), 5);
    assert!(lines[4].ends_with("[-]"));

    let out = run(&["--scenario", &scenario("kronecker.json"), "--format", "csv", "vgit", "scan"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "1/2,1/2,B C,true"));
}

#[test]
fn reports_can_go_to_a_file() {
    let path = std::env::temp_dir().join(format!("stabctl-{}-hodge.json", std::process::id()));
    let target = path.to_string_lossy().into_owned();
    let out = run(&["--scenario", &scenario("cone_threefold.json"), "--out", &target, "cone", "hodge"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["signature"], serde_json::json!([1, 2, 0]));
}

#[test]
fn repeated_runs_are_identical() {
    for (file, command) in [("one_wall.json", &["chambers"][..]), ("kronecker.json", &["vgit", "scan"][..])] {
        let path = scenario(file);
        let mut args = vec!["--scenario", path.as_str(), "--seed", "7"];
        args.extend_from_slice(command);
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}
