use std::process::Command;

use locsol_cli::{run_with, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE};
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("locsol").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let (code, out, err) = run(&a);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], "locsol-report v1");
    v
}

#[test]
fn r_of_p_prints_exact_and_decimal() {
    let (code, out, _) = run(&["r-of-p", "3"]);
    assert_eq!(code, EXIT_OK);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# locsol r-of-p p=3"));
    assert_eq!(lines.next().unwrap(), "151285/157456 ≈ 0.960808");

    let v = json(&["r-of-p", "2", "--model", "quartic"]);
    assert_eq!(v["result"]["density"]["exact"], "23087/24528");
    assert_eq!(v["command"], "r-of-p");
}

#[test]
fn bad_input_exits_with_usage_code() {
    for args in [
        &["r-of-p", "1"][..],
        &["r-of-p", "4"],
        &["r-of-p"],
        &["nonsense"],
        &["recursion"],
        &["padic-decide", "3", "--f", "1,2,3"],
        &["real-bounds", "--depth", "500"],
        &["real-mc", "--n", "0"],
        &["rho", "--pmax", "2"],
        &["rho", "--real-lower", "0.9", "--real-upper", "0.8"],
        &["r-of-p", "3", "--decimals", "1000"],
    ] {
        let (code, out, err) = run(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(out.is_empty() && !err.is_empty(), "{args:?}");
    }
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn recursion_reports_agree_with_closed_forms() {
    let v = json(&["recursion", "7"]);
    assert_eq!(v["result"]["closed_forms_agree"], true);
    let rho = locsol_core::recursion::local_density(7, locsol_core::ModelKind::GeneralizedBQ).unwrap();
    assert_eq!(v["result"]["fields"]["rho"]["exact"], rho.to_string());

    let s = json(&["recursion", "--symbolic"]);
    assert!(s["result"]["rho"].as_str().unwrap().contains('t'));
}

#[test]
fn fp_counts_enumeration_matches_formulas() {
    for model in ["gbq", "quartic"] {
        let a = json(&["fp-counts", "3", "--model", model]);
        let b = json(&["fp-counts", "3", "--model", model, "--formulas"]);
        assert_eq!(a["result"], b["result"]);
        assert_eq!(a["params"]["source"], "enumeration");
        assert_eq!(b["params"]["source"], "formula");
    }
    let v = json(&["fp-counts", "3"]);
    assert_eq!(v["result"]["totals"]["all"], "6561");
}

#[test]
fn padic_decide_reports_verified_witness() {
    let v = json(&["padic-decide", "5", "--f", "-2,0,0,0,-2", "--h", "1,-1,0"]);
    assert_eq!(v["result"]["verdict"], "soluble");
    assert_eq!(v["result"]["witness"]["verified"], true);
    let v = json(&["padic-decide", "2", "--f", "-1,0,0,0,-1"]);
    assert_eq!(v["result"]["verdict"], "insoluble");
    assert!(v["result"]["witness"].is_null());
}

#[test]
fn json_is_deterministic_across_worker_counts() {
    let a = run(&["real-bounds", "--depth", "12", "--workers", "1", "--json"]);
    let b = run(&["real-bounds", "--depth", "12", "--workers", "1", "--json"]);
    assert_eq!(a, b);
    let c: Value = serde_json::from_str(&run(&["real-bounds", "--depth", "12", "--workers", "3", "--json"]).1).unwrap();
    let a: Value = serde_json::from_str(&a.1).unwrap();
    assert_eq!(a["result"], c["result"]);

    let m1 = json(&["real-mc", "--n", "5000", "--seed", "4", "--workers", "1"]);
    let m2 = json(&["real-mc", "--n", "5000", "--seed", "4", "--workers", "2"]);
    assert_eq!(m1["result"], m2["result"]);
    let p1 = json(&["padic-mc", "3", "--n", "2000", "--seed", "4", "--workers", "1"]);
    let p2 = json(&["padic-mc", "3", "--n", "2000", "--seed", "4", "--workers", "2"]);
    assert_eq!(p1["result"], p2["result"]);
}

#[test]
fn real_bounds_table_refines() {
    let (code, out, _) = run(&["real-bounds", "--depth", "6,10"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[1].starts_with("Depth") && lines[1].contains("Lower bound") && lines[1].contains("Upper bound"));
    assert_eq!(lines.len(), 4);
    let v = json(&["real-bounds", "--depth", "6,10"]);
    let runs = v["result"]["runs"].as_array().unwrap();
    let lo = |i: usize| runs[i]["lower"]["decimal"].as_str().unwrap().parse::<f64>().unwrap();
    assert!(lo(0) <= lo(1));
}

#[test]
fn checkpoint_overflow_then_resume() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck");
    let ck = ck.to_str().unwrap();
    let (code, _, err) = run(&["real-bounds", "--depth", "14", "--checkpoint", ck, "--max-pending", "50"]);
    assert_eq!(code, EXIT_RESOURCE, "{err}");
    assert!(err.contains(ck));
    let resumed = json(&["real-bounds", "--depth", "14", "--resume", ck]);
    let fresh = json(&["real-bounds", "--depth", "14"]);
    assert_eq!(resumed["result"], fresh["result"]);

    std::fs::write(dir.path().join("ck"), "garbage").unwrap();
    assert_eq!(run(&["real-bounds", "--depth", "14", "--resume", ck]).0, EXIT_USAGE);
    assert_eq!(run(&["real-bounds", "--depth", "8,9", "--checkpoint", ck]).0, EXIT_USAGE);
}

#[test]
fn rho_rigor_flags() {
    let v = json(&["rho", "--real-lower", "0.873954", "--real-upper", "0.874124", "--trusted", "--pmax", "1000"]);
    assert_eq!(v["result"]["rigorous"], true);
    let v = json(&["rho", "--model", "gbq", "--real-lower", "0.871743", "--real-upper", "0.875743", "--pmax", "1000"]);
    assert_eq!(v["result"]["rigorous"], false);
    let v = json(&["rho", "--real-depth", "10", "--pmax", "100"]);
    assert_eq!(v["result"]["rigorous"], true);
    assert_eq!(v["result"]["real_part"]["source"], "real-bounds method=scaled4d depth=10");
    let v = json(&["rho", "--real-mc-n", "1000", "--pmax", "100"]);
    assert_eq!(v["result"]["rigorous"], false);
}

#[test]
fn binary_runs_and_reads_worker_env() {
    let bin = env!("CARGO_BIN_EXE_locsol");
    let out = Command::new(bin).args(["r-of-p", "3"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("151285/157456 ≈ 0.960808"));

    let bad = Command::new(bin).args(["r-of-p", "1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));

    let env_bad = Command::new(bin).args(["real-mc", "--n", "10"]).env("LOCSOL_WORKERS", "many").output().unwrap();
    assert_eq!(env_bad.status.code(), Some(EXIT_USAGE));
    let env_ok = Command::new(bin).args(["real-mc", "--n", "10", "--json"]).env("LOCSOL_WORKERS", "2").output().unwrap();
    assert!(env_ok.status.success());
}
