use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(format!("{name}.qasm"))
}

fn qcmark(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcmark"))
        .current_dir(dir)
        .env_remove("QCMARK_SEED")
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Embeds into 4gt5 and transpiles base and suspect onto different devices.
fn marked_pair(dir: &Path) {
    let host = fixture("4gt5");
    let host = host.to_str().unwrap();
    let o = qcmark(dir, &["embed", "--scheme", "combined", "--ancilla", "1,2", "--cnot", "2,1", "--seed", "7", host, "-o", "m.qasm", "--record", "r.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = qcmark(dir, &["transpile", "m.qasm", "--coupling", "ring7", "--basis", "extended", "-o", "suspect.qasm"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = qcmark(dir, &["transpile", host, "--coupling", "line5", "-o", "base.qasm"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn embed_extract_verify_confirms() {
    let dir = TempDir::new().unwrap();
    marked_pair(dir.path());
    let o = qcmark(dir.path(), &["extract", "base.qasm", "suspect.qasm", "-o", "f.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["outputs"]["evidence"], true);
    let o = qcmark(dir.path(), &["verify", "f.json", "r.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report(&o)["outputs"]["status"], "confirmed");
}

#[test]
fn identical_files_give_no_evidence_and_absent() {
    let dir = TempDir::new().unwrap();
    marked_pair(dir.path());
    let o = qcmark(dir.path(), &["extract", "base.qasm", "base.qasm", "-o", "f.json"]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("no watermark evidence"));
    let o = qcmark(dir.path(), &["verify", "f.json", "r.json"]);
    assert_eq!(code(&o), 4);
    assert_eq!(report(&o)["outputs"]["status"], "absent");
}

#[test]
fn tampered_suspect_is_partial() {
    let dir = TempDir::new().unwrap();
    let host = fixture("4gt11");
    let o = qcmark(dir.path(), &["embed", "--scheme", "combined", "--ancilla", "1,2", "--cnot", "2,1", host.to_str().unwrap(), "-o", "m.qasm", "--record", "r.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("m.qasm")).unwrap();
    let line = "ry(pi) q[1];";
    assert_eq!(text.matches(line).count(), 1, "{text}");
    std::fs::write(dir.path().join("t.qasm"), text.replace(line, "")).unwrap();
    let o = qcmark(dir.path(), &["extract", host.to_str().unwrap(), "t.qasm", "-o", "f.json"]);
    assert_eq!(code(&o), 0);
    let o = qcmark(dir.path(), &["verify", "f.json", "r.json"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let missing = &report(&o)["outputs"]["verdicts"][0]["missing"];
    assert_eq!(missing.as_array().unwrap().len(), 1);
    assert_eq!(missing[0]["gate"], "ry");
}

#[test]
fn random_embed_is_deterministic_per_seed() {
    let dir = TempDir::new().unwrap();
    let host = fixture("rd32");
    let host = host.to_str().unwrap();
    let run = |seed: &str, tag: &str| {
        let out = format!("{tag}.qasm");
        let rec = format!("{tag}.json");
        let o = qcmark(dir.path(), &["embed", "--scheme", "random", "--seed", seed, "--k", "2", host, "-o", &out, "--record", &rec]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
        (read(&out), read(&rec), o.stdout)
    };
    let a = run("7", "a");
    let b = run("7", "b");
    let c = run("8", "c");
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
    assert_ne!(a.0, c.0);
    // output paths are not part of the report
    assert_eq!(a.2, b.2);
}

#[test]
fn again_stacks_two_records_and_both_verify() {
    let dir = TempDir::new().unwrap();
    let host = fixture("rd32");
    let host = host.to_str().unwrap();
    let o = qcmark(dir.path(), &["embed", "--scheme", "combined", "--ancilla", "0,1", "--cnot", "0,1", host, "-o", "m1.qasm", "--record", "r.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = qcmark(dir.path(), &["embed", "--again", "--scheme", "combined", "--theta", "pi/3", "--ancilla", "0,1", "--cnot", "0,1", "m1.qasm", "-o", "m2.qasm", "--record", "r.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report(&o)["outputs"]["stacked_records"], 2);
    let records: Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(records.as_array().unwrap().len(), 2);
    assert_ne!(records[0]["seed"], records[1]["seed"]);

    let o = qcmark(dir.path(), &["extract", host, "m2.qasm", "-o", "f.json"]);
    assert_eq!(code(&o), 0);
    let o = qcmark(dir.path(), &["verify", "f.json", "r.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report(&o)["outputs"]["verdicts"].as_array().unwrap().len(), 2);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let host = fixture("ex1");
    let o = Command::new(env!("CARGO_BIN_EXE_qcmark"))
        .current_dir(dir.path())
        .env("QCMARK_SEED", "41")
        .args(["embed", "--scheme", "random", host.to_str().unwrap(), "-o", "m.qasm", "--record", "r.json"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report(&o)["seed"], 41);
    let o = qcmark(dir.path(), &["embed", "--scheme", "random", "--seed", "41", host.to_str().unwrap(), "-o", "n.qasm", "--record", "s.json"]);
    let read = |p: &str| std::fs::read(dir.path().join(p)).unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(read("m.qasm"), read("n.qasm"));
}

#[test]
fn time_flag_adds_wall_time_and_report_file_works() {
    let dir = TempDir::new().unwrap();
    marked_pair(dir.path());
    let o = qcmark(dir.path(), &["extract", "base.qasm", "suspect.qasm"]);
    let plain = report(&o);
    assert!(plain.get("wall_time_ms").is_none());
    assert!(plain["outputs"]["finding"]["gates"].is_array());
    let o = qcmark(dir.path(), &["extract", "base.qasm", "suspect.qasm", "--time", "--report", "rep.json"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let timed: Value = serde_json::from_slice(&std::fs::read(dir.path().join("rep.json")).unwrap()).unwrap();
    assert!(timed["wall_time_ms"].as_f64().unwrap() >= 0.0);
    assert_eq!(timed["outputs"]["suspect_instructions"], plain["outputs"]["suspect_instructions"]);
    assert_eq!(timed["inputs"], plain["inputs"]);
}

#[test]
fn noiseless_bench_has_unit_pst_and_table_ppa() {
    let dir = TempDir::new().unwrap();
    let o = qcmark(dir.path(), &["bench", "--noise", "none", "--fixture", "ex1,4gt11", "--coupling", "line5,t5", "--csv", "b.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = report(&o)["outputs"]["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(r["pst_base"], 1.0);
        assert_eq!(r["pst_wm"], 1.0);
    }
    // ex1 has 3 qubits plus a fresh ancilla
    let ppa = rows[0]["ppa"].as_f64().unwrap();
    assert!((ppa - 1.503e-6).abs() < 1e-9, "{ppa}");
    let csv = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn toy_bench_drop_is_small() {
    let dir = TempDir::new().unwrap();
    let o = qcmark(dir.path(), &["bench", "--trials", "10", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let drop = report(&o)["outputs"]["mean_pst_drop"].as_f64().unwrap();
    assert!(drop < 0.05, "{drop}");
}

#[test]
fn sweep_and_qaoa_workflows() {
    let dir = TempDir::new().unwrap();
    let o = qcmark(dir.path(), &["sweep-phase", "--fixture", "4gt5", "--steps", "24", "--csv", "s.csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let peak = report(&o)["outputs"]["argmax_theta"].as_f64().unwrap();
    assert_eq!(peak, std::f64::consts::PI);
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("theta,config,tvd\n"));

    let o = qcmark(dir.path(), &["qaoa", "--graph", "triangle", "--p", "2", "--watermark", "-o", "q.qasm"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = &report(&o)["outputs"];
    assert_eq!(out["max_cut"], 2.0);
    assert!(out["ar"].as_f64().unwrap() >= 0.9);
    assert!(out["ar_shift"].as_f64().unwrap().abs() < 1e-12);
    let text = std::fs::read_to_string(dir.path().join("q.qasm")).unwrap();
    assert!(text.contains("qreg q[4];"), "{text}");

    std::fs::write(dir.path().join("g.json"), r#"{"n": 4, "edges": [[0,1],[1,2],[2,3],[3,0]]}"#).unwrap();
    let o = qcmark(dir.path(), &["qaoa", "--graph-file", "g.json", "--shots", "500"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(report(&o)["outputs"]["max_cut"], 4.0);
    assert_eq!(report(&o)["inputs"].as_object().unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("bad.qasm"), "OPENQASM 2.0;\nqreg q[1];\nfoo q[0];\n").unwrap();
    let o = qcmark(dir.path(), &["transpile", "bad.qasm", "-o", "x.qasm"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("bad.qasm:3:1"), "{}", stderr(&o));
    assert!(!dir.path().join("x.qasm").exists());

    let o = qcmark(dir.path(), &["extract", "missing.qasm", "bad.qasm"]);
    assert_eq!(code(&o), 1);

    // rotating a functional qubit is refused
    let host = fixture("4gt5");
    let o = qcmark(dir.path(), &["embed", "--scheme", "rotation", "--ancilla", "1", "--target", "4", host.to_str().unwrap(), "-o", "y.qasm", "--record", "y.json"]);
    assert_eq!(code(&o), 2);
    assert!(!dir.path().join("y.qasm").exists());

    let o = qcmark(dir.path(), &["embed", "--scheme", "sideways", host.to_str().unwrap(), "-o", "y.qasm", "--record", "y.json"]);
    assert_eq!(code(&o), 2);
    let o = qcmark(dir.path(), &["bench", "--coupling", "moon"]);
    assert_eq!(code(&o), 2);
    let o = qcmark(dir.path(), &["frobnicate"]);
    assert_eq!(code(&o), 2);
}
