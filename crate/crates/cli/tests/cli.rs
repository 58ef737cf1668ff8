use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn synto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synto")).args(args).output().expect("spawn synto")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", stderr(out));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn labels(v: &Value) -> Vec<(String, i64, i64)> {
    let mut out: Vec<_> = v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            (
                c["label"].as_str().unwrap().to_string(),
                c["degree"].as_i64().unwrap(),
                c["adams_weight"].as_i64().unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

const TP2: &str = r#"{
  "p": 2,
  "generators": [
    {"name": "λ_1", "kind": "exterior", "degree": 3, "adams_weight": 1},
    {"name": "μ^{2}", "kind": "polynomial", "degree": 4, "adams_weight": 0},
    {"name": "ε_1", "kind": "exterior", "degree": 3, "adams_weight": -1},
    {"name": "t", "kind": "laurent", "degree": -2, "adams_weight": 0, "filtration": 1}
  ],
  "rules": [
    {"page": 1, "matcher": {"generator": "ε_1"}, "image": [{"monomial": {"t": 1, "μ^{2}": 1}}]},
    {"page": 2, "matcher": {"generator": "t"}, "image": [{"monomial": {"t": 3, "λ_1": 1}}]}
  ],
  "window": {"degree": [-12, 12], "filtration": [-10, 12]}
}"#;

fn defs(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    std::io::Write::write_all(&mut f, text.as_bytes()).unwrap();
    f
}

#[test]
fn syntomic_svg_and_text_match_golden() {
    let svg = synto(&["syntomic", "-p", "2", "-n", "2", "--format", "svg"]);
    assert!(svg.status.success());
    assert_eq!(stdout(&svg), golden("syntomic_2_2.svg"));
    let text = synto(&["syntomic", "-p", "2", "-n", "2"]);
    assert_eq!(stdout(&text), golden("syntomic_2_2.txt"));
}

#[test]
fn height_minus_one_has_two_classes() {
    let v = json(&synto(&["syntomic", "-p", "3", "-n", "-1", "--format", "json"]));
    assert_eq!(labels(&v), vec![("1".into(), 0, 0), ("∂".into(), -1, 1)]);
    assert_eq!(v["n"], -1);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chart.txt");
    let out = synto(&["syntomic", "-p", "2", "-n", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), golden("syntomic_2_2.txt"));
}

#[test]
fn small_prime_is_a_config_error() {
    let out = synto(&["k-bp2", "-p", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error[config]: PRECONDITION"), "{}", stderr(&out));
}

#[test]
fn narrow_window_is_a_window_error() {
    let out = synto(&["syntomic", "-p", "2", "-n", "1", "--window", "0..3"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("enlarge --window"));
}

#[test]
fn enumeration_limit_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_synto"))
        .args(["tp", "-p", "2", "-n", "0"])
        .env("SYNTO_MAX_WINDOW", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("WINDOW_LIMIT"));
    let bad = Command::new(env!("CARGO_BIN_EXE_synto"))
        .args(["tp", "-p", "2", "-n", "0"])
        .env("SYNTO_MAX_WINDOW", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(synto(&["tp", "-p", "2"]).status.code(), Some(2));
    assert_eq!(synto(&["tp", "-p", "2", "-n", "0", "--window", "4..1"]).status.code(), Some(2));
    let help = synto(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(stdout(&help).contains("run-custom"));
}

#[test]
fn custom_definition_reproduces_tp() {
    let f = defs(TP2);
    let custom = json(&synto(&["run-custom", "--defs", f.path().to_str().unwrap(), "--format", "json"]));
    let builtin = json(&synto(&["tp", "-p", "2", "-n", "0", "--window", "-12..12", "--format", "json"]));
    assert_eq!(labels(&custom), labels(&builtin));
    assert!(custom.get("n").is_none());
    assert!(!custom["differentials"].as_array().unwrap().is_empty());
}

#[test]
fn window_flag_overrides_definition() {
    let f = defs(TP2);
    let v = json(&synto(&["run-custom", "--defs", f.path().to_str().unwrap(), "--window", "0..4", "--format", "json"]));
    let got: Vec<String> = labels(&v).into_iter().map(|c| c.0).collect();
    assert_eq!(got, vec!["1", "t^{-2}", "λ_1"]);
}

#[test]
fn no_rules_echo_the_first_page() {
    let f = defs(
        r#"{"p": 3,
            "generators": [{"name": "x", "kind": "exterior", "degree": 3, "adams_weight": 1},
                           {"name": "y", "kind": "polynomial", "degree": 4, "adams_weight": 0}],
            "window": {"degree": [0, 8]}}"#,
    );
    let v = json(&synto(&["run-custom", "--defs", f.path().to_str().unwrap(), "--format", "json"]));
    assert_eq!(
        labels(&v),
        vec![("1".into(), 0, 0), ("x".into(), 3, 1), ("xy".into(), 7, 1), ("y".into(), 4, 0), ("y^{2}".into(), 8, 0)]
    );
    assert_eq!(v["differentials"], Value::Array(vec![]));
}

#[test]
fn misplaced_image_is_rejected() {
    let f = defs(&TP2.replace(r#""t": 3, "λ_1": 1"#, r#""t": 2, "λ_1": 1"#));
    let out = synto(&["run-custom", "--defs", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("BIDEGREE_MISMATCH"), "{}", stderr(&out));
}

#[test]
fn malformed_definition_reports_position() {
    let f = defs("{\"p\": 2,\n \"generators\": [}");
    let out = synto(&["run-custom", "--defs", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("PARSE_ERROR at line 2"), "{}", stderr(&out));
    let g = defs(&TP2.replace("\"p\": 2", "\"p\": 2, \"extra\": 1"));
    let out = synto(&["run-custom", "--defs", g.path().to_str().unwrap()]);
    assert!(stderr(&out).contains("PARSE_ERROR"), "{}", stderr(&out));
    let h = defs(&TP2.replace(r#""generator": "ε_1""#, r#""generator": "ε_9""#));
    let out = synto(&["run-custom", "--defs", h.path().to_str().unwrap()]);
    assert!(stderr(&out).contains("PARSE_ERROR in rules[0].matcher"), "{}", stderr(&out));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["tc-minus", "-p", "3", "-n", "0", "--format", "json"][..],
        &["hochschild-may", "-p", "2", "-n", "1", "--format", "json"],
        &["tc-bp2", "-p", "5", "--format", "json"],
    ] {
        let a = synto(args);
        let b = synto(args);
        assert!(a.status.success(), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn bp2_tables() {
    let tc = stdout(&synto(&["tc-bp2", "-p", "5", "--window", "-3..3"]));
    assert_eq!(tc, "degree dim\n-3 0\n-2 0\n-1 1\n0 1\n1 1\n2 0\n3 1\n");
    let k = json(&synto(&["k-bp2", "-p", "5", "--window", "-2..0", "--format", "json"]));
    let rows = k.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["k"], 1);
    let svg = synto(&["k-bp2", "-p", "5", "--window", "-2..4", "--format", "svg"]);
    assert!(stdout(&svg).starts_with("<?xml"));
}

#[test]
fn verify_subset_passes() {
    let out = synto(&["verify", "--only", "1,2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.starts_with("[PASS]")));
    assert_eq!(synto(&["verify", "--only", "10"]).status.code(), Some(2));
}
