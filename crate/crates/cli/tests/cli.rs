use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn ncpb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncpb")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn clock_shift_report() {
    let out = ncpb(&["example", "clock-shift", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["version"], "ncpb/1");
    assert_eq!(r["status"], "ok");
    assert_eq!(r["payload"]["certificate"]["witnesses"].as_array().unwrap().len(), 2);
    assert_eq!(r["payload"]["component_dims"].as_array().unwrap().len(), 9);
    assert!(r["transcript"].as_array().unwrap().iter().any(|l| l == "RS = ζ SR"));
}

#[test]
fn h2_methods_agree() {
    let mu = report(&ncpb(&["cohomology", "h2", "--group", "2,2", "--module", "mu:2", "--method", "all"]));
    assert_eq!(mu["status"], "ok");
    assert_eq!(mu["payload"]["factors"], serde_json::json!([2, 2, 2]));
    let circle = report(&ncpb(&["cohomology", "h2", "--group", "2,2", "--module", "circle"]));
    assert_eq!(circle["payload"]["factors"], serde_json::json!([2]));
    assert_eq!(circle["payload"]["methods"].as_array().unwrap().len(), 3);
}

#[test]
fn missing_file_is_usage_error() {
    let out = ncpb(&["bundle", "certify", "--system", "missing.json"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(code(&ncpb(&["frobnicate"])), 3);
    assert_eq!(code(&ncpb(&["cohomology", "h2", "--group", "2"])), 3);
}

#[test]
fn malformed_json_names_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    fs::write(&p, "{\"version\": \"ncpb/1\", \"kind\": ").unwrap();
    let out = ncpb(&["algebra", "verify", "--file", path_str(&p)]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.json"));
}

#[test]
fn tampered_structure_constants_fail() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m2.json");
    assert_eq!(code(&ncpb(&["algebra", "build", "--kind", "matrix:2", "--out", path_str(&p)])), 0);
    assert_eq!(code(&ncpb(&["algebra", "verify", "--file", path_str(&p)])), 0);
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    doc["algebra"]["products"][0][2] = Value::from(1);
    fs::write(&p, doc.to_string()).unwrap();
    let out = ncpb(&["algebra", "verify", "--file", path_str(&p)]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["status"], "fail");
}

#[test]
fn zero_budget_refuses_enumeration() {
    let out = ncpb(&["--budget", "0", "cohomology", "h2", "--group", "2,2", "--module", "mu:2", "--method", "bruteforce"]);
    assert_eq!(code(&out), 2);
    let r = report(&out);
    assert_eq!(r["status"], "refused");
    assert_eq!(r["refused"]["budget"], "0");
    let out = ncpb(&["--budget", "0", "example", "cross-check", "--level", "quick"]);
    assert_eq!(code(&out), 2);
    let r = report(&out);
    let refused: Vec<u64> = r["payload"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "refused")
        .map(|c| c["id"].as_u64().unwrap())
        .collect();
    assert!(refused.contains(&3) && refused.contains(&5), "{refused:?}");
    assert!(r["payload"].as_array().unwrap().iter().all(|c| c["status"] != "fail"));
}

#[test]
fn catalog_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out = ncpb(&["example", "catalog", "--out", path_str(&a)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(code(&ncpb(&["example", "catalog", "--out", path_str(&b)])), 0);
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 20);
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n:?} differs");
        let v: Value = serde_json::from_slice(&fs::read(a.join(n)).unwrap()).unwrap();
        let expect = if n == "non_split_c2.json" { "fail" } else { "ok" };
        assert_eq!(v["report"]["status"], expect, "{n:?}");
    }
}

#[test]
fn catalog_into_a_file_path_is_an_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("plain");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("catalog");
    let out = ncpb(&["example", "catalog", "--out", path_str(&target)]);
    assert_eq!(code(&out), 1);
    assert!(report(&out)["error"].as_str().unwrap().contains("plain"));
}

#[test]
fn non_split_needs_fourth_roots() {
    let dir = tempfile::tempdir().unwrap();
    let ws = path_str(dir.path());
    assert_eq!(code(&ncpb(&["--workspace", ws, "example", "catalog", "--out", "cat"])), 0);
    assert_eq!(
        code(&ncpb(&["--workspace", ws, "crossed-product", "build", "--file", "cat/non_split_c2.json", "--out", "ns.json"])),
        0
    );
    let over_mu2 = ncpb(&["--workspace", ws, "bundle", "certify", "--system", "ns.json"]);
    assert_eq!(code(&over_mu2), 1);
    assert_eq!(report(&over_mu2)["payload"]["failures"][0]["failure"]["reason"], "no_candidate");
    let over_mu4 = ncpb(&["--workspace", ws, "--conductor", "4", "bundle", "certify", "--system", "ns.json", "--out", "cert.json"]);
    assert_eq!(code(&over_mu4), 0);
    let split2 = ncpb(&["--workspace", ws, "crossed-product", "split", "--file", "cat/non_split_c2.json", "--generator", "1"]);
    assert_eq!(code(&split2), 1);
    let split4 = ncpb(&["--workspace", ws, "--conductor", "4", "crossed-product", "split", "--file", "cat/non_split_c2.json", "--generator", "1"]);
    assert_eq!(code(&split4), 0);
}

#[test]
fn certificate_round_trip_and_trivialize() {
    let dir = tempfile::tempdir().unwrap();
    let ws = path_str(dir.path());
    assert_eq!(code(&ncpb(&["--workspace", ws, "algebra", "build", "--kind", "group:2,2", "--out", "g.json"])), 0);
    let out = ncpb(&["--workspace", ws, "example", "catalog", "--out", "cat"]);
    assert_eq!(code(&out), 0);
    let cert = ncpb(&["--workspace", ws, "bundle", "certify", "--system", "cat/group_algebra_c6.json", "--out", "c6.json"]);
    assert_eq!(code(&cert), 0);
    let triv = ncpb(&["--workspace", ws, "bundle", "trivialize", "--system", "cat/group_algebra_c6.json", "--certificate", "c6.json"]);
    assert_eq!(code(&triv), 0);
    let r = report(&triv);
    assert_eq!(r["payload"]["points"], 6);
    assert_eq!(r["payload"]["orbits"], 1);
    // a certificate for one system does not verify against another
    let wrong = ncpb(&["--workspace", ws, "bundle", "trivialize", "--system", "cat/group_algebra_c3.json", "--certificate", "c6.json"]);
    assert_eq!(code(&wrong), 1);
}

#[test]
fn conductor_restricts_loaded_scalars() {
    let dir = tempfile::tempdir().unwrap();
    let ws = path_str(dir.path());
    assert_eq!(code(&ncpb(&["--workspace", ws, "example", "clock-shift", "--n", "3", "--out", "cs3.json"])), 0);
    assert_eq!(code(&ncpb(&["--workspace", ws, "--conductor", "2", "bundle", "decompose", "--system", "cs3.json"])), 3);
    let ok = ncpb(&["--workspace", ws, "--conductor", "6", "bundle", "decompose", "--system", "cs3.json"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(report(&ok)["payload"]["dims"].as_array().unwrap().len(), 9);
}

#[test]
fn crossed_product_class_and_obstruction() {
    let dir = tempfile::tempdir().unwrap();
    let ws = path_str(dir.path());
    assert_eq!(code(&ncpb(&["--workspace", ws, "cohomology", "bilinear", "--n", "3", "--out", "w.json"])), 0);
    let cocycle = report(&ncpb(&["--workspace", ws, "cohomology", "cocycle", "--file", "w.json"]));
    assert_eq!(cocycle["payload"]["trivial"], false);
    assert_eq!(code(&ncpb(&["--workspace", ws, "factor-system", "scalar", "--cochain", "w.json", "--out", "fs.json"])), 0);
    assert_eq!(code(&ncpb(&["--workspace", ws, "crossed-product", "build", "--file", "fs.json", "--out", "a.json"])), 0);
    let class = ncpb(&["--workspace", ws, "crossed-product", "class", "--file", "a.json"]);
    assert_eq!(code(&class), 0);
    assert_eq!(report(&class)["payload"]["class_order_circle"], 3);
    let ob = ncpb(&["--workspace", ws, "factor-system", "obstruction", "--file", "fs.json"]);
    assert_eq!(code(&ob), 0);
    assert_eq!(report(&ob)["payload"]["trivial"], true);
}

#[test]
fn pretty_and_compact_agree() {
    let a = report(&ncpb(&["group", "info", "--orders", "2,4"]));
    let b = report(&ncpb(&["--pretty", "group", "info", "--orders", "2,4"]));
    assert_eq!(a["payload"], b["payload"]);
    assert_eq!(a["payload"]["exponent"], 4);
    let q = report(&ncpb(&["group", "quotient", "--orders", "2,4", "--sub", "0,2"]));
    assert_eq!(q["payload"]["quotient"], serde_json::json!([2, 2]));
}

#[test]
fn quick_cross_check_passes() {
    let out = ncpb(&["example", "cross-check", "--level", "quick"]);
    let r = report(&out);
    assert_eq!(code(&out), 0, "{r}");
    assert_eq!(r["payload"].as_array().unwrap().len(), 10);
}
