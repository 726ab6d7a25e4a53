//! End-to-end checks of the command-line binary: exit codes, output shape,
//! artifact determinism, and cache behaviour.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cyclemix"));
    cmd.env_remove("CYCLEMIX_CACHE_DIR");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr_str(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines()
        .filter(|line| !line.starts_with('#'))
        .skip(1)
        .filter(|line| !line.trim().is_empty())
        .collect()
}

const LAZY: &str = "-1:0.25,0:0.5,1:0.25";

#[test]
fn gap_reports_json_with_positive_gap() {
    let out = run(&["gap", "--n", "8", "--k", "4", "--p", LAZY]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let gamma = report["gamma_exact"].as_f64().unwrap();
    assert!(gamma > 0.0 && gamma < 1.0);
    assert!(report["gamma_formula"].as_f64().unwrap() > 0.0);
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&["gap", "--n", "8", "--k", "4", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_2() {
    let out = run(&["gap", "--n", "8", "--k", "4", "--p", "0:0.7,1:0.2"]);
    assert_eq!(out.status.code(), Some(2), "weights not summing to one");
    assert!(!stderr_str(&out).is_empty());

    let out = run(&[
        "gap", "--n", "8", "--k", "4", "--model", "asep", "--alpha", "4", "--beta", "4",
    ]);
    assert_eq!(out.status.code(), Some(2), "rates too large for laziness");

    let out = run(&["spectrum", "--n", "8", "--k", "9", "--p", LAZY]);
    assert_eq!(out.status.code(), Some(2), "k > n");
}

#[test]
fn cap_exceeded_exits_3() {
    let out = run(&["spectrum", "--n", "16", "--k", "8", "--p", LAZY, "--cap", "10"]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr_str(&out));
    assert!(stderr_str(&out).contains("cap"));
}

#[test]
fn spectrum_of_the_rotation_chain_has_two_orbits() {
    let out = run(&["spectrum", "--n", "5", "--k", "2", "--p", "1:1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
    let text = stdout_str(&out);
    assert_eq!(data_rows(&text).len(), 2, "output:\n{text}");
}

#[test]
fn repeated_runs_print_identical_bytes() {
    let args = [
        "sample", "--n", "10", "--k", "4", "--p", LAZY, "--steps", "100", "--seed", "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn subcommands_smoke_out_cleanly() {
    for args in [
        vec!["mix", "--n", "6", "--k", "3", "--p", LAZY, "--tmax", "20"],
        vec![
            "mix", "--n", "6", "--k", "3", "--p", LAZY, "--tmax", "20", "--start", "worst",
        ],
        vec!["cutoff", "--instances", "6:3,8:4", "--p", LAZY],
        vec!["classify", "--n", "8", "--k", "3"],
        vec!["saddle", "--n", "24", "--k", "12", "--ell", "3"],
        vec!["audit", "--n", "6", "--k", "3", "--p", LAZY],
        vec!["model", "asep", "--n", "8", "--k", "4", "--alpha", "1", "--beta", "1"],
        vec!["model", "dimer", "--n", "8", "--k", "4", "--a1", "1", "--a2", "1"],
        vec!["model", "constant", "--n", "8", "--k", "4", "--p", LAZY],
    ] {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{args:?} failed: {}",
            stderr_str(&out)
        );
        assert!(!out.stdout.is_empty(), "{args:?} produced no output");
    }
}

#[test]
fn saddle_output_carries_both_gap_readings() {
    let out = run(&["saddle", "--n", "32", "--k", "16", "--ell", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!(report["radius_gap"].as_f64().unwrap() >= 0.0);
    assert!(report["gamma_exact"].as_f64().unwrap() > 0.0);
}

fn single_artifact(dir: &Path) -> std::path::PathBuf {
    let entries: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "artifact"))
        .collect();
    assert_eq!(entries.len(), 1, "expected one cache entry, got {entries:?}");
    entries.into_iter().next().unwrap()
}

#[test]
fn cache_serves_identical_bytes_and_survives_corruption() {
    let cache = tempfile::tempdir().unwrap();
    let work = tempfile::tempdir().unwrap();
    let spectrum = |tag: &str| -> (Vec<u8>, String) {
        let path = work.path().join(format!("{tag}.csv"));
        let out = bin()
            .args(["spectrum", "--n", "8", "--k", "4", "--p", LAZY, "--out"])
            .arg(&path)
            .env("CYCLEMIX_CACHE_DIR", cache.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr_str(&out));
        (std::fs::read(&path).unwrap(), stderr_str(&out))
    };

    let (cold, cold_err) = spectrum("cold");
    assert!(!cold_err.contains("loaded from cache"));
    let (warm, warm_err) = spectrum("warm");
    assert!(warm_err.contains("loaded from cache"), "stderr: {warm_err}");
    assert_eq!(cold, warm);

    std::fs::write(single_artifact(cache.path()), b"garbage").unwrap();
    let (healed, healed_err) = spectrum("healed");
    assert!(
        !healed_err.contains("loaded from cache"),
        "corrupt entry must not be served: {healed_err}"
    );
    assert_eq!(cold, healed);
}

#[test]
fn no_cache_flag_bypasses_the_cache() {
    let cache = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let out = bin()
            .args(["spectrum", "--n", "6", "--k", "3", "--p", LAZY, "--no-cache"])
            .env("CYCLEMIX_CACHE_DIR", cache.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert!(!stderr_str(&out).contains("loaded from cache"));
    }
    let entries = std::fs::read_dir(cache.path()).unwrap().count();
    assert_eq!(entries, 0, "cache directory must stay empty");
}
