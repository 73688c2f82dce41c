//! End-to-end runs of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

fn gpr(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gpr"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("PR_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(gpr(&["solve", "--bogus"], None).status.code(), Some(2));
    assert_eq!(gpr(&["solve", "--model", "fourier"], None).status.code(), Some(2));
    assert_eq!(gpr(&["sweep", "--ratio-list", "5,4"], None).status.code(), Some(2));
    assert_eq!(gpr(&["figure1", "--trials", "0"], None).status.code(), Some(2));
    assert_eq!(gpr(&["gen", "--n", "4"], None).status.code(), Some(2));
    assert_eq!(gpr(&["solve", "--n", "4"], Some("zero")).status.code(), Some(2));
}

#[test]
fn data_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.bin");
    assert_eq!(gpr(&["solve", "--input", path_str(&missing)], None).status.code(), Some(3));
    let junk = dir.path().join("junk.bin");
    std::fs::write(&junk, b"not an ensemble").unwrap();
    assert_eq!(gpr(&["solve", "--input", path_str(&junk)], None).status.code(), Some(3));
}

#[test]
fn gen_then_solve_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let ens = dir.path().join("e.bin");
    let out = gpr(&["gen", "--n", "8", "--m", "100", "--seed", "5", "--out", path_str(&ens)], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = dir.path().join("trace.csv");
    let out = gpr(&["solve", "--input", path_str(&ens), "--seed", "5", "--out", path_str(&trace)], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.starts_with("iter,f,grad_norm,dist,step_kind,delta,model_decrease\n"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("trace.csv.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["success"], serde_json::Value::Bool(true));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 6\ntrials = 3\nalgo = \"gd\"\nformat = \"json\"\n").unwrap();
    let out = gpr(&["figure1", "--config", path_str(&cfg), "--trials", "2"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 6);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["algo"], "gd");
}

#[test]
fn outputs_are_byte_identical_across_thread_counts() {
    let runs: [&[&str]; 4] = [
        &["figure1", "--n", "8", "--trials", "6", "--seed", "9"],
        &["sweep", "--n", "6", "--trials", "3", "--ratio-list", "4,8", "--seed", "9"],
        &["trs-bench", "--n", "8", "--trials", "30", "--seed", "9"],
        &["certify", "--n", "6", "--samples", "2000", "--per-region", "10", "--format", "json"],
    ];
    for args in runs {
        let a = gpr(args, Some("1"));
        let b = gpr(args, Some("3"));
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn landscape_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("grid.csv");
    let res = gpr(&["landscape", "--steps", "21", "--out", path_str(&out)], None);
    assert!(res.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("axis,min,max,steps\n"));
    assert_eq!(csv.lines().count(), 3 + 21);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("grid.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["mode"]["mode"], "population-real-gaussian");
}

#[test]
fn every_csv_starts_with_a_header() {
    for (args, header) in [
        (&["figure1", "--n", "5", "--trials", "2"][..], "trial,"),
        (&["sweep", "--n", "5", "--trials", "2", "--ratio-list", "6"][..], "ratio,"),
        (&["trs-bench", "--n", "4", "--trials", "5"][..], "index,"),
        (&["solve", "--n", "5"][..], "iter,"),
    ] {
        let out = gpr(args, None);
        assert!(out.status.success());
        assert!(String::from_utf8_lossy(&out.stdout).starts_with(header), "{args:?}");
    }
}

#[test]
fn certify_writes_rows_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("certs.csv");
    let run = gpr(
        &["certify", "--n", "8", "--samples", "2000", "--per-region", "10", "--out", path_str(&out)],
        None,
    );
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("index,region,passed,in_r1,"));
    assert_eq!(csv.lines().count(), 1 + 40);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("certs.csv.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["coverage"]["uncovered"], 0);
    assert_eq!(summary["tallies"].as_array().unwrap().len(), 4);
}
