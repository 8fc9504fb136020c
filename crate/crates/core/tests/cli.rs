use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn run(args: &[&str], input: Option<&Value>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_katofan"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut stdin = child.stdin.take().unwrap();
        if let Some(v) = input {
            stdin.write_all(v.to_string().as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn with_schema(mut v: Value) -> Value {
    v["schema"] = json!("katofan/1");
    v
}

#[test]
fn projective_plane_dot() {
    let out = run(&["fan", "builtin", "P2", "--dot"], None);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let nodes = text.lines().filter(|l| l.contains("[label=")).count();
    let edges = text.lines().filter(|l| l.contains("->")).count();
    assert_eq!(nodes, 7);
    assert_eq!(edges, 9);
}

#[test]
fn primes_of_the_plane() {
    let input = with_schema(json!({"monoid": {"rank": 2, "generators": [[1, 0], [0, 1]]}}));
    let out = run(&["monoid", "primes"], Some(&input));
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["count"], 4);
    assert_eq!(v["schema"], "katofan/1");
}

#[test]
fn line_in_the_plane() {
    let input = with_schema(json!({
        "fan": "A2",
        "polynomial": {"terms": [
            {"exponent": [1, 0], "coefficient": "1"},
            {"exponent": [0, 1], "coefficient": "1"},
            {"exponent": [0, 0], "coefficient": "1"},
        ]},
    }));
    let out = run(&["trop", "hypersurface"], Some(&input));
    assert!(out.status.success());
    let v = json_of(&out);
    let strata = v["strata"].as_array().unwrap();
    let rays: usize = strata
        .iter()
        .flat_map(|s| s["cones"].as_array().unwrap())
        .filter(|c| c["dim"] == 1)
        .count();
    let points = strata
        .iter()
        .filter(|s| s["face"].as_array().unwrap().len() == 1)
        .filter(|s| s["cones"].as_array().unwrap().len() == 1)
        .count();
    assert_eq!(rays, 2);
    assert_eq!(points, 2);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["complex", "strata"], Some(&with_schema(json!({"fan": "P1xP1"}))));
    let b = run(&["complex", "strata"], Some(&with_schema(json!({"fan": "P1xP1"}))));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a)["count"], 9);
    let c = run(&["trop", "check", "--samples", "5", "--jobs", "2"], None);
    let d = run(&["trop", "check", "--samples", "5"], None);
    assert_eq!(c.stdout, d.stdout);
    assert_eq!(json_of(&c)["passed"], true);
}

#[test]
fn emitted_fans_are_accepted() {
    let out = run(&["fan", "builtin", "nodal"], None);
    let v = json_of(&out);
    let again = run(&["fan", "show"], Some(&with_schema(json!({"fan": v["fan"]}))));
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stdout));
    assert_eq!(json_of(&again)["fan"], v["fan"]);
    let cone = run(
        &["cone", "dual"],
        Some(&with_schema(json!({"cone": {"rank": 2, "generators": [[1, 0], [1, 2]]}}))),
    );
    let dual = json_of(&cone);
    let back = run(&["cone", "dual"], Some(&with_schema(json!({"cone": dual["cone"]}))));
    let mut rays = json_of(&back)["cone"]["rays"].as_array().unwrap().clone();
    rays.sort_by_key(|r| r.to_string());
    assert_eq!(rays, vec![json!([1, 0]), json!([1, 2])]);
}

#[test]
fn points_and_quotients() {
    let point = with_schema(json!({"fan": "A2", "open": "0:", "values": {"0": "0", "1": "5/2"}}));
    let out = run(&["complex", "point"], Some(&point));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let p = json_of(&out);
    assert_eq!(p["point"]["values"], json!({"0": "5/2"}));
    // a canonical point is accepted again and left unchanged
    let again = run(&["complex", "point"], Some(&with_schema(p["point"].clone())));
    assert_eq!(json_of(&again)["point"], p["point"]);

    let eq = with_schema(json!({
        "quotient": "swap",
        "x": {"open": "0:", "values": {"0": "2", "1": "1"}},
        "y": {"open": "0:", "values": {"0": "1", "1": "2"}},
    }));
    assert_eq!(json_of(&run(&["complex", "equal"], Some(&eq)))["equal"], true);
}

#[test]
fn dual_complex_of_two_conics() {
    let input = with_schema(json!({
        "components": ["C1", "C2"],
        "strata": [{"divisors": [0, 1], "components": [
            {"label": "p1"}, {"label": "p2"}, {"label": "p3"}, {"label": "p4"}
        ]}],
    }));
    let out = run(&["dualcx", "build"], Some(&input));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json_of(&out)["counts"], json!([2, 4]));
}

#[test]
fn exit_codes() {
    let missing = run(&["monoid", "primes"], Some(&json!({"monoid": {"rank": 1, "generators": [[1]]}})));
    assert_eq!(missing.status.code(), Some(2));
    let malformed = run(&["monoid", "primes"], Some(&with_schema(json!({"monoid": 3}))));
    assert_eq!(malformed.status.code(), Some(2));
    let unknown = run(&["fan", "builtin", "P7"], None);
    assert_eq!(unknown.status.code(), Some(1));
    assert_eq!(json_of(&unknown)["error"]["kind"], "unknown_fan");
    let wrong = with_schema(json!({"monoid": {"rank": 2, "generators": [[1, 0], [0, 1]]}, "element": [1, 2, 3]}));
    let mismatch = run(&["monoid", "contains"], Some(&wrong));
    assert_eq!(mismatch.status.code(), Some(1));
    assert_eq!(json_of(&mismatch)["error"]["kind"], "dimension_mismatch");
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(2));
}

#[test]
fn files_in_and_out() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    let output = dir.path().join("out.json");
    std::fs::write(&input, with_schema(json!({"name": "P1xP1"})).to_string()).unwrap();
    let out = run(
        &["fan", "polyhedral", "--in", input.to_str().unwrap(), "--out", output.to_str().unwrap()],
        None,
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["count"], 9);
}
