use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ifunc"))
}

fn run(args: &[&str]) -> (i32, Value) {
    let out: Output = bin().args(args).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {text}"));
    (out.status.code().unwrap(), v)
}

fn scratch(name: &str, body: &str) -> String {
    let p: PathBuf = [env!("CARGO_TARGET_TMPDIR"), name].iter().collect();
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn lerch_file(name: &str) -> String {
    let out = bin().args(["make", "lerch", "--params", r#"{"p":2,"alpha":1,"q":2,"beta":1}"#]).output().unwrap();
    assert!(out.status.success());
    scratch(name, &String::from_utf8(out.stdout).unwrap())
}

fn cplx(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

#[test]
fn lerch_square_at_one_half() {
    let f = lerch_file("lerch_eval.json");
    let (code, v) = run(&["eval", &f, "--z1", "0.5", "--z2", "0.5"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["method"], "series");
    let (re, im) = cplx(&v["value"]);
    // (Li2(1/2) / (1/2))^2
    assert!((re - 1.356_016_122_632_985_7).abs() < 1e-11 && im.abs() < 1e-14, "{v}");
    let (code, c) = run(&["eval", &f, "--z1", "0.5", "--z2", "0.5", "--method", "contour", "--tol", "1e-8"]);
    assert_eq!(code, 0, "{c}");
    assert_eq!(c["method"], "contour");
    assert!((cplx(&c["value"]).0 - re).abs() < 1e-6, "{c}");
}

#[test]
fn validate_reports_boundary_verdicts() {
    let f = lerch_file("lerch_validate.json");
    let (code, v) = run(&["validate", &f, "--z1", "0.5", "--z2", "-0.25"]);
    assert_eq!(code, 0);
    assert_eq!(v["valid"], true);
    assert_eq!(v["convergence"]["delta1"], 2.0);
    assert_eq!(v["convergence"]["verdict_z1"], "boundary-absolute");
    assert_eq!(v["series"]["applicable"], true);
}

#[test]
fn exit_codes() {
    let f = lerch_file("lerch_codes.json");
    // evaluation failure
    let (code, v) = run(&["eval", &f, "--z1", "1.5", "--z2", "0.5", "--method", "series"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "not-applicable");
    // structural violation
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    doc["z1_block"]["n"] = 7.into();
    let bad = scratch("lerch_bad_n.json", &doc.to_string());
    let (code, v) = run(&["eval", &bad, "--z1", "0.5", "--z2", "0.5"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["violations"][0]["field"], "z1_block.n");
    let (code, v) = run(&["validate", &bad]);
    assert_eq!(code, 2);
    assert_eq!(v["valid"], false);
    // schema
    let junk = scratch("junk.json", r#"{"format":"ifunc2-v1"}"#);
    let (code, v) = run(&["validate", &junk]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "schema");
    // usage and io
    let (code, v) = run(&["eval", &f, "--z1", "abc", "--z2", "1"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "usage");
    let (code, v) = run(&["bogus"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "usage");
    let (code, v) = run(&["eval", "/definitely/not/here.json", "--z1", "1", "--z2", "1"]);
    assert_eq!(code, 3);
    assert_eq!(v["error"]["kind"], "io");
}

#[test]
fn rewrite_with_check() {
    let f = lerch_file("lerch_rewrite.json");
    let (code, v) = run(&["rewrite", &f, "--rule", "7.3", "--k1", "2", "--k2", "1", "--check"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["rewrite"]["rule"], "7.3");
    assert_eq!(v["verify"]["pass"], true);
    let pts = v["verify"]["points"].as_array().unwrap();
    assert!(pts.iter().any(|p| p["skipped"].as_str().is_some_and(|s| s.contains("principal branch"))));
    assert!(pts.iter().any(|p| p["deviation"].as_f64().is_some_and(|d| d < 1e-12)));
    // unknown rule
    let (code, _) = run(&["rewrite", &f, "--rule", "9.9"]);
    assert_eq!(code, 3);
}

#[test]
fn make_then_reduce() {
    let out = bin().args(["make", "kdf", "--params", r#"{"a":[0.5],"c":[1.5],"d":[2.0]}"#]).output().unwrap();
    assert!(out.status.success());
    let f = scratch("kdf.json", &String::from_utf8(out.stdout).unwrap());
    let (code, v) = run(&["reduce", &f]);
    assert_eq!(code, 0);
    let kinds: Vec<&str> = v["tags"].as_array().unwrap().iter().map(|t| t["kind"].as_str().unwrap()).collect();
    assert!(kinds.contains(&"kampe-de-feriet"), "{kinds:?}");
    assert_eq!(v["confluence"]["error"]["kind"], "constraint-violated");

    let (code, v) = run(&["make", "polylog", "--params", r#"{"p":2,"q":3}"#, "--meta"]);
    assert_eq!(code, 0);
    assert_eq!(v["kind"], "polylog");
    assert_eq!(v["spec"]["format"], "ifunc2-v1");
    let (code, v) = run(&["make", "lerch", "--params", r#"{"p":2}"#]);
    assert_eq!(code, 3, "{v}");
}

#[test]
fn compare_is_seeded() {
    let f = lerch_file("lerch_compare.json");
    let args = ["compare", &f, &f, "--points", "4", "--seed", "11"];
    let (code, a) = run(&args);
    assert_eq!(code, 0);
    let (_, b) = run(&args);
    assert_eq!(a, b);
    assert_eq!(a["max_deviation"], 0.0);
    assert_eq!(a["points"].as_array().unwrap().len(), 4);
}
