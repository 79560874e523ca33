use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn gew(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gew"))
        .args(args)
        .output()
        .expect("gew runs")
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("elapsed_ms");
            m.values_mut().for_each(strip_timings);
        }
        Value::Array(xs) => xs.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

#[test]
fn example1_passes_in_text_and_json() {
    let out = gew(&["verify", "example1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 3);

    let out = gew(&["verify", "example1", "--json"]);
    assert!(out.status.success());
    let v = json_of(&out);
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        [
            "example1/(b,a)",
            "example1/(c,a),(c^-1,a)",
            "example1/(1,a)"
        ]
    );
    assert!(v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["status"] == "pass"));
}

#[test]
fn reports_are_deterministic_given_the_seed() {
    let args = ["check-surface", "--samples", "6", "--seed", "11", "--json"];
    let mut a = json_of(&gew(&args));
    let mut b = json_of(&gew(&args));
    strip_timings(&mut a);
    strip_timings(&mut b);
    assert_eq!(a, b);
    let mut c = json_of(&gew(&[
        "check-surface",
        "--samples",
        "6",
        "--seed",
        "12",
        "--json",
    ]));
    strip_timings(&mut c);
    assert_ne!(a, c);
}

#[test]
fn infinite_dihedral_is_rejected() {
    let out = gew(&["check-freeproduct", "--factors", "z2,z2", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["reports"][0]["status"], "error");
    assert!(v["reports"][0]["details"]["error"]
        .as_str()
        .unwrap()
        .contains("D_inf"));
}

#[test]
fn commutator_candidate_fails_l1_only() {
    let out = gew(&["check-lee", "--word", "[z1,z2]", "--radius", "2", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["reports"][0]["name"], "lee/L1");
    assert_eq!(v["reports"][0]["status"], "fail");
    assert_eq!(v["reports"][1]["status"], "pass");
    assert_eq!(v["reports"][1]["details"]["tuples"], 289);
}

#[test]
fn observation_on_a_given_target() {
    let out = gew(&[
        "verify",
        "observation",
        "--group",
        "symmetric(3)",
        "--f",
        "s1*s2",
        "--json",
    ]);
    assert!(out.status.success());
    let case = &json_of(&out)["reports"][0]["details"]["cases"][0];
    assert_eq!(case["verified"], true);
}

#[test]
fn round_trips_from_files() {
    for system in ["example1.system", "example1_q.system"] {
        let out = gew(&[
            "roundtrip",
            "--system",
            &data(system),
            "--config",
            &data("example1.toml"),
        ]);
        assert!(
            out.status.success(),
            "{system}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn parse_errors_carry_positions() {
    let dir = std::env::temp_dir().join(format!("gew-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.system");
    std::fs::write(&bad, "group: free(b,c)\n?x = b^\n").unwrap();
    let out = gew(&[
        "roundtrip",
        "--system",
        bad.to_str().unwrap(),
        "--config",
        &data("example1.toml"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("column"), "{err}");
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn thread_count_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_gew"))
        .args(["check-lee", "--word", "[z1,z2]", "--radius", "1"])
        .env("GEW_THREADS", "1")
        .output()
        .unwrap();
    // radius-1 tuples with equal commutators are all simultaneously conjugate
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_gew"))
        .args(["verify", "example1"])
        .env("GEW_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
