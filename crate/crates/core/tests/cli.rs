use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn treewco(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treewco"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn verdict(v: &Value, family: &str, statement: &str) -> String {
    v["analysis"][family]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["statement"] == statement)
        .map(|c| c["verdict"].as_str().unwrap().to_string())
        .unwrap()
}

#[test]
fn analyze_z_isometry() {
    let out = treewco(&[
        "analyze",
        "--tree",
        r#"{"family":"zline","depth":8}"#,
        "--psi",
        r#"{"kind":"builtin","name":"zfold_weight"}"#,
        "--phi",
        r#"{"kind":"builtin","name":"zfold"}"#,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(verdict(&v, "linf", "Linf.Isometry"), "Holds");
    assert_eq!(verdict(&v, "linf", "Linf.BoundedBelow"), "Holds");
    assert!(v["analysis"]["cross_checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["passed"] == true));
}

#[test]
fn oracle_agrees_on_small_line() {
    let out = treewco(&[
        "oracle",
        "--tree",
        r#"{"family":"zline","depth":2}"#,
        "--psi",
        r#"{"kind":"builtin","name":"random","params":{"seed":3}}"#,
        "--phi",
        r#"{"kind":"builtin","name":"random"}"#,
        "--seed",
        "5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"agree\": true"));
    assert!(!text.contains("\"agree\": false"));
}

#[test]
fn export_homogeneous_tree() {
    let out = treewco(&["export", "--tree", r#"{"family":"homogeneous","q":2,"depth":3}"#]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.lines().filter(|l| l.contains("[label=")).count(), 22);
}

#[test]
fn load_error_exits_one_with_pointer() {
    let out = treewco(&[
        "analyze",
        "--tree",
        r#"{"family":"zline","depth":2}"#,
        "--phi",
        r#"{"kind":"table","map":{"0":0,"2":9}}"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/map/2"));
}

#[test]
fn golden_drift_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for entry in std::fs::read_dir(&golden).unwrap() {
        let path = entry.unwrap().path();
        std::fs::copy(&path, dir.path().join(path.file_name().unwrap())).unwrap();
    }
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_treewco"))
            .arg("examples")
            .env("TREEWCO_GOLDEN_DIR", dir.path())
            .output()
            .unwrap()
    };
    assert_eq!(run().status.code(), Some(0));

    let target = dir.path().join("bounded-not-compact.json");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    v["schema"] = Value::from(2);
    std::fs::write(&target, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    let out = run();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("/schema"));
}

#[test]
fn explicit_export_round_trip() {
    let tree = treewco::RootedTree::random(4, 11, 1, 3).unwrap();
    let spec = serde_json::to_string(&tree.to_explicit_spec()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tree.json");
    std::fs::write(&path, &spec).unwrap();

    let from_file = treewco(&["export", "--tree", path.to_str().unwrap()]);
    let from_random = treewco(&["export", "--tree", r#"{"family":"random","depth":4,"seed":11}"#]);
    assert!(from_file.status.success() && from_random.status.success());
    let edges = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| l.contains("->"))
            .map(str::to_string)
            .collect::<Vec<_>>()
    };
    assert_eq!(edges(&from_file), edges(&from_random));
    assert_eq!(edges(&from_file).len(), tree.len() - 1);
}
