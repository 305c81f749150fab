use cymirror::series::{BoundJson, SeriesJson};
use cymirror_cli::emit::{series_from_csv, series_to_csv};
use cymirror_cli::report::Report;
use std::path::Path;
use std::process::{Command, Output};

fn cymirror(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cymirror")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const P3_POLYTOPE: &str = r#"{"rank": 3, "vertices": [[3,-1,-1],[-1,3,-1],[-1,-1,3],[-1,-1,-1]]}"#;
const P3_FAN: &str = r#"{"rays": [[1,0,0],[0,1,0],[0,0,1],[-1,-1,-1]], "max_cones": [[1,2,3],[0,2,3],[0,1,3],[0,1,2]]}"#;
const P11114_FAN: &str = r#"{"rays": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1],[-1,-1,-1,-4]],
  "max_cones": [[1,2,3,4],[0,2,3,4],[0,1,3,4],[0,1,2,4],[0,1,2,3]]}"#;

#[test]
fn verify_examples_pass() {
    for target in ["hhhh", "4h"] {
        let o = cymirror(&["verify", target]);
        assert_eq!(o.status.code(), Some(0), "{target}");
        let r: Report = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(r.pass && !r.checks.is_empty());
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(cymirror(&["--help"]).status.code(), Some(0));
}

#[test]
fn configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cymirror(&["verify", "nothing"]).status.code(), Some(1));
    assert_eq!(cymirror(&["verify", "hhhh", "--order", "0"]).status.code(), Some(1));
    assert_eq!(cymirror(&["verify", "hhhh", "--order", "3"]).status.code(), Some(1));
    assert_eq!(cymirror(&["mirror", "map"]).status.code(), Some(1));
    assert_eq!(cymirror(&["verify", "morrison"]).status.code(), Some(1));
    let bad = write(dir.path(), "bad.json", r#"{"orders": 4}"#);
    assert_eq!(cymirror(&["verify", "hhhh", "--config", &bad]).status.code(), Some(1));
    let o = cymirror(&["emit", "y0", "--example", "custom"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.json");
    let o = cymirror(&["polytope", "dual", "--polytope", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let garbled = write(dir.path(), "garbled.json", r#"{"rank": 2, "vertices": "x"}"#);
    assert_eq!(cymirror(&["polytope", "dual", "--polytope", &garbled]).status.code(), Some(2));
    let square = write(dir.path(), "square.json", r#"{"rank": 2, "vertices": [[0,0],[2,0],[0,2],[2,2]]}"#);
    assert_eq!(cymirror(&["verify", "morrison", "--polytope", &square]).status.code(), Some(2));
}

#[test]
fn failing_check_exits_three_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"classical": "3"}"#);
    let out = dir.path().join("report.json");
    let o = cymirror(&["verify", "hhhh", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let r: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(!r.pass);
    assert!(r.checks.iter().any(|c| c.pass) && r.checks.iter().any(|c| !c.pass));
}

#[test]
fn csv_and_json_round_trip() {
    let json = cymirror(&["emit", "correlation", "--example", "4h", "--order", "5"]);
    let csv = cymirror(&["emit", "correlation", "--example", "4h", "--order", "5", "--format", "csv"]);
    assert_eq!(json.status.code(), Some(0));
    let from_json: SeriesJson = serde_json::from_str(&stdout(&json)).unwrap();
    let from_csv = series_from_csv(&stdout(&csv), from_json.bound.clone()).unwrap();
    assert_eq!(from_json, from_csv);
    assert_eq!(from_json.terms[1], (vec![1], "29504/1".to_string()));
    assert_eq!(series_to_csv(&from_csv).unwrap(), stdout(&csv));
}

#[test]
fn empty_series_is_header_only() {
    let s = SeriesJson { vars: vec!["z".into()], bound: BoundJson::Order(4), terms: vec![] };
    let text = series_to_csv(&s).unwrap();
    assert_eq!(text, "z,numerator,denominator\n");
    assert_eq!(series_from_csv(&text, BoundJson::Order(4)).unwrap(), s);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", "all", "--format", "csv"];
    let a = cymirror(&args);
    let b = cymirror(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"example": "hhhh", "order": 4, "format": "json"}"#);
    let from_file: SeriesJson = serde_json::from_str(&stdout(&cymirror(&["emit", "y0", "--config", &cfg]))).unwrap();
    assert_eq!(from_file.bound, BoundJson::Order(4));
    let o = cymirror(&["emit", "y0", "--config", &cfg, "--order", "6", "--example", "4h"]);
    let flagged: SeriesJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(flagged.bound, BoundJson::Order(6));
    assert_ne!(from_file.terms[1], flagged.terms[1]);
}

#[test]
fn polytope_commands() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p3.json", P3_POLYTOPE);
    let o = cymirror(&["polytope", "reflexive", "--polytope", &p, "--format", "text"]);
    assert_eq!(stdout(&o), "reflexive\ntrue\n");
    let dual: serde_json::Value = serde_json::from_str(&stdout(&cymirror(&["polytope", "dual", "--polytope", &p]))).unwrap();
    assert_eq!(dual["vertices"].as_array().unwrap().len(), 4);
    let points = cymirror(&["polytope", "points", "--polytope", &p, "--format", "csv"]);
    assert_eq!(stdout(&points).lines().count(), 36);
    assert_eq!(cymirror(&["verify", "morrison", "--polytope", &p]).status.code(), Some(0));
}

#[test]
fn fan_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w.json", P11114_FAN);
    let o = cymirror(&["fan", "box", "--fan", &f]);
    let elements: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(elements.as_array().unwrap().len(), 4);
    let p3 = write(dir.path(), "p3.json", P3_FAN);
    let o = cymirror(&["fan", "subdivide", "--fan", &p3, "--ray", "1,1,0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ray,4,\"1,1,0\""));
    let o = cymirror(&["fan", "lift", "--fan", &p3]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn custom_system_matches_named_example() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write(dir.path(), "p3.json", P3_FAN);
    let custom = cymirror(&[
        "mirror", "instantons", "--example", "custom", "--fan", &p3, "--partition", "0;1;2;3", "--classical", "2",
    ]);
    let named = cymirror(&["mirror", "instantons", "--example", "hhhh"]);
    assert_eq!(custom.status.code(), Some(0));
    assert_eq!(custom.stdout, named.stdout);
    let pf = cymirror(&["gkz", "pf", "--example", "hhhh", "--format", "text"]);
    assert!(stdout(&pf).starts_with("z_power\ttheta_coefficients\n0\t0/1,0/1,0/1,0/1,1/1\n"));
}
