//! End-to-end tests of the binary: exit codes, report formats, and the
//! documented file surfaces.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn lagro() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lagro"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    lagro()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lagro-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn solve_reports_the_refutation_instance() {
    let dir = tempdir("solve");
    let gen = run(&["gen", "counterexample", "--out", "ce.json"], &dir);
    assert!(gen.status.success());
    let out = run(&["solve", "ce.json", "--trace-out", "trace.txt"], &dir);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("value       0"), "{text}");
    assert!(text.contains("restarts    0"), "{text}");
    let trace = std::fs::read_to_string(dir.join("trace.txt")).unwrap();
    assert!(trace.lines().count() > 2, "trace file must hold the run");
    assert!(trace.contains("kind=inner-opt"), "{trace}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_matches_solve() {
    let dir = tempdir("oracle");
    run(&["gen", "random-general", "--seed", "4", "--out", "r.json"], &dir);
    let solve = stdout(&run(&["solve", "r.json"], &dir));
    let oracle = stdout(&run(&["oracle", "r.json"], &dir));
    let solve_value = solve
        .lines()
        .find_map(|l| l.strip_prefix("value       "))
        .expect("value line")
        .to_string();
    let oracle_value = oracle
        .lines()
        .find_map(|l| l.strip_prefix("optimum     "))
        .expect("optimum line")
        .to_string();
    assert_eq!(solve_value, oracle_value);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn check_exit_codes() {
    let dir = tempdir("check");
    run(&["gen", "counterexample", "--out", "ce.json"], &dir);
    let out = run(&["check", "ce.json"], &dir);
    assert_eq!(out.status.code(), Some(3), "failing conditions exit 3");
    assert!(stdout(&out).contains("FAIL"));
    run(&["gen", "interdiction", "--n", "2", "--seed", "1", "--out", "i.json"], &dir);
    let out = run(&["check", "i.json"], &dir);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("overall: pass"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bound_condition_violation_and_success() {
    let dir = tempdir("bound");
    run(&["gen", "counterexample", "--out", "ce.json"], &dir);
    let out = run(&["bound", "ce.json"], &dir);
    assert_eq!(out.status.code(), Some(3), "fractional data exits 3");
    run(
        &["gen", "random-general", "--homogeneous", "--seed", "6", "--out", "h.json"],
        &dir,
    );
    let out = run(&["bound", "h.json"], &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("lambda"));
    let out = run(&["bound", "h.json", "--u-mode", "interval"], &dir);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn robust_infeasible_exits_2() {
    let dir = tempdir("infeasible");
    // Row 0*y >= 1 defeats every realization.
    let text = r#"{
        "kind": "general",
        "dims": {"n1": 1, "nc2": 0, "nd2": 1, "np": 1, "m": 1},
        "c0": [0], "C": [[0]],
        "d0": [-1], "Dc": [], "Dd": [[0]],
        "T": [[0]], "Wc": [[]], "Wd": [[0]],
        "h0": [1], "H": [[0]],
        "X": {"points": [[0]]},
        "Xi": {"points": [[0], [1]]},
        "Y": {"yc_upper": [], "yd_lower": [0], "yd_upper": [1]}
    }"#;
    std::fs::write(dir.join("bad.json"), text).unwrap();
    let out = run(&["solve", "bad.json"], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("witness xi"));
    let out = run(&["oracle", "bad.json"], &dir);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bench_emits_sorted_tsv() {
    let dir = tempdir("bench");
    let suite = dir.join("suite");
    std::fs::create_dir_all(&suite).unwrap();
    run(
        &["gen", "counterexample", "--out", "suite/b_ce.json"],
        &dir,
    );
    run(
        &["gen", "network", "--routes", "2", "--k", "1", "--out", "suite/a_net.json"],
        &dir,
    );
    let out = run(&["bench", "suite", "--out", "report.tsv"], &dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.join("report.tsv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "instance\tvalue\topt\titerations\ttime_s\trestarts");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("a_net\t"), "rows sorted by name: {report}");
    assert!(lines[2].starts_with("b_ce\t0\t1\t"), "{report}");
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("2/2 verified optimal"), "{summary}");
    // With a deliberately tiny initial multiplier, exactly the network
    // row restarts once; the other instance recovers by doubling alone.
    let out = run(
        &["bench", "suite", "--out", "restart.tsv", "--lambda0", "1/100"],
        &dir,
    );
    assert!(out.status.success());
    let report = std::fs::read_to_string(dir.join("restart.tsv")).unwrap();
    let restart_counts: Vec<&str> = report
        .lines()
        .skip(1)
        .map(|l| l.rsplit_once('\t').unwrap().1)
        .collect();
    assert_eq!(restart_counts, vec!["1", "0"], "{report}");
    // Empty suite: header only.
    let empty = dir.join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let out = run(&["bench", "empty"], &dir);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn lambda_sweep_values() {
    let dir = tempdir("sweep");
    let out = run(&["lambda-sweep", "--grid", "9"], &dir);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut rows = std::collections::HashMap::new();
    for line in text.lines().skip(1) {
        let (lam, val) = line.split_once('\t').unwrap();
        rows.insert(lam.to_string(), val.to_string());
    }
    assert_eq!(rows["0"], "-1");
    assert_eq!(rows["1"], "-1/2");
    assert_eq!(rows["2"], "0");
    assert_eq!(rows["4"], "0");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn trace_env_var_streams_to_stderr() {
    let dir = tempdir("env");
    run(&["gen", "counterexample", "--out", "ce.json"], &dir);
    let out = lagro()
        .args(["solve", "ce.json"])
        .env("LAGRO_LOG", "trace")
        .current_dir(&dir)
        .output()
        .unwrap();
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("kind=outer"), "{err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_writes_loadable_files() {
    let dir = tempdir("gen");
    for args in [
        vec!["gen", "counterexample", "--gamma", "10/1", "--out", "a.json"],
        vec!["gen", "interdiction", "--n", "3", "--seed", "9", "--out", "b.json"],
        vec!["gen", "random-indicator", "--seed", "5", "--out", "c.json"],
        vec!["gen", "network", "--routes", "3", "--k", "1", "--out", "d.json"],
    ] {
        let out = run(&args, &dir);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["a.json", "b.json", "c.json", "d.json"] {
        let out = run(&["oracle", f], &dir);
        assert!(
            out.status.code() == Some(0) || out.status.code() == Some(2),
            "{f} must load and evaluate"
        );
    }
    let out = run(&["gen", "bogus"], &dir);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).ok();
}
