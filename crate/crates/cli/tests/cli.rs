use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn lumo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lumo")).args(args).output().expect("lumo runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lumo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write(name: &str, text: &str) -> String {
    let p = scratch(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const ODET: &str = r#"[{"pauli":"XX"},{"pauli":"YY"},{"pauli":"ZZ"}]"#;

#[test]
fn bell_invariants() {
    let bell = lumo(&["state-gen", "--kind", "bell"]);
    let path = write("bell.json", std::str::from_utf8(&bell.stdout).unwrap());
    let doc = json_of(&lumo(&["invariants", "--state", &path]));
    assert!((doc["I1"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert!((doc["negativity"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn classify_odet() {
    let path = write("odet.json", ODET);
    let doc = json_of(&lumo(&["classify", "--observable", &path]));
    assert_eq!(doc["rank"], 3);
    assert!((doc["det_prefactor"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn verify_single_claim() {
    let out = lumo(&["verify", "--claim", "det_type3_lower", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["checks"][0]["passed"], true);
    assert_eq!(lumo(&["verify", "--claim", "no_such_check"]).status.code(), Some(2));
}

#[test]
fn generated_states_feed_every_consumer() {
    let obs2 = write("odet2.json", ODET);
    let obs3 = write("z3.json", r#"[{"pauli":"ZZZ"}]"#);
    for (qubits, format) in [("2", "bloch"), ("2", "matrix"), ("3", "bloch"), ("3", "matrix")] {
        let gen = lumo(&["--seed", "11", "state-gen", "--qubits", qubits, "--kind", "mixed", "--format", format]);
        let state = write(&format!("s{qubits}{format}.json"), std::str::from_utf8(&gen.stdout).unwrap());
        let obs = if qubits == "2" { &obs2 } else { &obs3 };
        json_of(&lumo(&["invariants", "--state", &state]));
        let exact = json_of(&lumo(&["twirl", "--observable", obs, "--state", &state, "-t", "2"]));
        let mc = json_of(&lumo(&["mc", "--observable", obs, "--state", &state, "-t", "2", "--samples", "4000"]));
        let (e, m) = (exact["moment"].as_f64().unwrap(), &mc["estimate"]);
        assert!((m["mean"].as_f64().unwrap() - e).abs() < 5.0 * m["stderr"].as_f64().unwrap() + 1e-9);
        let invariant = if qubits == "2" { "I2" } else { "kempe" };
        json_of(&lumo(&["simulate", "--state", &state, "--invariant", invariant, "-k", "20", "-m", "20"]));
    }
}

#[test]
fn output_is_reproducible_across_worker_counts() {
    let state = write("repro.json", std::str::from_utf8(&lumo(&["--seed", "5", "state-gen"]).stdout).unwrap());
    let args = ["simulate", "--state", &state, "--invariant", "det", "-k", "60", "-m", "30"];
    let one = lumo(&[&["--seed", "9", "--workers", "1"][..], &args[..]].concat());
    let many = lumo(&[&["--seed", "9", "--workers", "4"][..], &args[..]].concat());
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let other = lumo(&[&["--seed", "10"][..], &args[..]].concat());
    assert_ne!(one.stdout, other.stdout);
}

#[test]
fn trace_csv_has_one_row_per_setting() {
    let state = write("trace_state.json", std::str::from_utf8(&lumo(&["state-gen", "--kind", "bell"]).stdout).unwrap());
    let trace = scratch("trace.csv");
    let trace_arg = trace.to_string_lossy().into_owned();
    json_of(&lumo(&["simulate", "--state", &state, "--invariant", "det", "-k", "7", "-m", "10", "--trace", &trace_arg]));
    let mut rd = csv::Reader::from_path(&trace).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["observable", "unitary", "setting", "estimate"]);
    assert_eq!(rd.records().count(), 7 * 3);
}

#[test]
fn exit_codes() {
    let bad = write("bad.json", "{not json");
    assert_eq!(lumo(&["invariants", "--state", &bad]).status.code(), Some(2));
    let obs = write("odet_exit.json", ODET);
    let ghz = write("ghz.json", std::str::from_utf8(&lumo(&["state-gen", "--kind", "ghz", "--qubits", "3"]).stdout).unwrap());
    assert_eq!(lumo(&["twirl", "--observable", &obs, "--state", &ghz, "-t", "2"]).status.code(), Some(3));
}
