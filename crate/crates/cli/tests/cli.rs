use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqcharpoly")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.json"));
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&raw).expect("schema compiles")
}

fn json_checked(name: &str, args: &[&str]) -> Value {
    let mut full = vec![name];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--format", "json"]);
    let v: Value = serde_json::from_str(&run_ok(&full)).unwrap();
    let s = schema(name);
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} {args:?} violates its schema: {msgs:?}");
    }
    v
}

fn rational(v: &Value) -> (String, String) {
    (v["num"].as_str().unwrap().to_string(), v["den"].as_str().unwrap().to_string())
}

#[test]
fn dist_gl22_has_two_rows() {
    let v = json_checked("dist", &["--family", "GL", "--n", "2", "--q", "2"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rational(&rows[0]["probability"]), ("2".into(), "3".into()));
    assert_eq!(rational(&rows[1]["probability"]), ("1".into(), "3".into()));
    assert_eq!(rational(&v["total"]), ("1".into(), "1".into()));
}

#[test]
fn dist_oracle_agrees() {
    for args in [["--family", "GU", "--n", "2", "--q", "2"], ["--family", "Oplus", "--n", "4", "--q", "2"]] {
        let mut a = args.to_vec();
        a.push("--oracle");
        let v = json_checked("dist", &a);
        assert_eq!(v["oracle_agrees"], Value::Bool(true), "{args:?}");
    }
}

#[test]
fn every_subcommand_matches_its_schema() {
    json_checked("count", &["--q", "4", "--max-degree", "5"]);
    json_checked("order", &["--family", "Sp", "--n", "3", "--q", "5"]);
    json_checked("sample", &["--family", "Sp", "--n", "2", "--q", "3", "--count", "3", "--seed", "1"]);
    json_checked("sample", &["--family", "GU", "--n", "2", "--q", "3", "--seed", "1"]);
    json_checked("bounds", &["--family", "GL,GU,Sp,Oplus", "--q", "2,3", "--n-max", "4"]);
    for kind in ["gf-plain", "gf-unitary", "gf-star", "majorant", "decay", "majorization"] {
        json_checked("series", &["--kind", kind, "--q", "3", "--b", "3", "--truncation", "12"]);
    }
    json_checked("series", &["--kind", "upper", "--flavor", "uhelp", "--b", "3", "--truncation", "10"]);
    json_checked("derange", &["--family", "Sp", "--n", "4", "--q", "3", "--b", "2", "--trials", "500", "--seed", "1"]);
    json_checked("derange", &["--family", "Oplus", "--n", "4", "--q", "3", "--cond", "unitary-in-o"]);
    json_checked("invariable", &["--n", "6", "--r", "2", "--exact", "--e", "2"]);
    json_checked("invariable", &["--n", "4", "--q", "2", "--r", "2", "--trials", "300", "--e", "2", "--exact"]);
    json_checked("verify", &["--only", "4,9"]);
}

#[test]
fn count_csv_has_header_and_rows() {
    let out = run_ok(&["count", "--q", "2", "--max-degree", "4"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "d,N0,N,Ntilde,Mtilde,Nstar,Mstar");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[4].split(',').nth(1), Some("3"));
}

#[test]
fn series_prints_exact_fractions() {
    let out = run_ok(&["series", "--kind", "decay", "--b", "2", "--truncation", "3", "--format", "csv"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "r,coefficient,normalized");
    assert!(lines[2].starts_with("1,1/2,"));
    assert!(lines[3].starts_with("2,3/8,"));
}

#[test]
fn monte_carlo_output_is_byte_identical() {
    let args = ["invariable", "--n", "50", "--r", "3", "--trials", "100000", "--seed", "7"];
    let a = run_ok(&args);
    assert_eq!(a, run_ok(&args));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["trials"], 100000);
    let d = ["derange", "--family", "GL", "--n", "6", "--q", "2", "--b", "3", "--trials", "5000", "--seed", "3"];
    assert_eq!(run_ok(&d), run_ok(&d));
    let s = ["sample", "--family", "Oplus", "--n", "6", "--q", "3", "--count", "4", "--seed", "9"];
    assert_eq!(run_ok(&s), run_ok(&s));
}

#[test]
fn gu_with_b_two_is_rejected() {
    let out = run(&["derange", "--family", "GU", "--n", "4", "--q", "2", "--b", "2"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("there is no embedding if b=2"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_parameters_fail_cleanly() {
    for args in [
        vec!["order", "--family", "GU", "--n", "2", "--q", "6"],
        vec!["dist", "--family", "Oplus", "--n", "3", "--q", "2"],
        vec!["order", "--family", "Foo", "--n", "2", "--q", "2"],
        vec!["sample", "--family", "GL", "--n", "2", "--q", "2", "--format", "csv"],
        vec!["invariable", "--n", "5"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty(), "{args:?} should explain");
    }
}

#[test]
fn enumeration_cap_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fqcharpoly"))
        .args(["dist", "--family", "GL", "--n", "3", "--q", "2", "--oracle"])
        .env("FQCHARPOLY_ENUM_CAP", "100")
        .output()
        .unwrap();
    assert!(!out.status.success(), "GL(3,2) has order 168 > 100");
    let ok = Command::new(env!("CARGO_BIN_EXE_fqcharpoly"))
        .args(["dist", "--family", "GL", "--n", "3", "--q", "2", "--oracle"])
        .env("FQCHARPOLY_ENUM_CAP", "1000")
        .output()
        .unwrap();
    assert!(ok.status.success());
}

#[test]
fn verify_reports_each_selected_check() {
    let v = json_checked("verify", &["--max-order", "1000", "--only", "1,2,6"]);
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    assert!(checks.iter().all(|c| c["passed"] == Value::Bool(true)), "{checks:?}");
    assert_eq!(v["passed"], Value::Bool(true));
}
