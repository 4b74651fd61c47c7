//! End-to-end checks of the binary: determinism, file formats, warnings,
//! and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn saddlekit(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saddlekit"))
        .args(args)
        .arg("--out")
        .arg(out_dir)
        .output()
        .expect("binary must run")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap_or_else(|e| panic!("parsing {name}: {e}"))
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("saddlekit-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn simulate_is_deterministic_and_labelled() {
    let dir = tempdir("sim");
    let out = saddlekit(
        &["simulate", "--game", "xy", "--method", "ogda", "--eta", "-0.25", "--steps", "80"],
        &dir,
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let first = read(&dir, "simulate_trajectory.csv");
    assert!(first.starts_with("t,x_1,y_1,dist_to_limit\n"));

    let out = saddlekit(
        &["simulate", "--game", "xy", "--method", "ogda", "--eta", "-0.25", "--steps", "80"],
        &dir,
    );
    assert!(out.status.success());
    let second = read(&dir, "simulate_trajectory.csv");
    assert_eq!(first, second, "reruns must be byte-identical");

    let summary = json(&dir, "simulate_summary.json");
    assert_eq!(summary["schema"], 1);
    assert_eq!(summary["method"], "ogda");
    assert!(summary["predicted_rate"]["rate"].as_f64().unwrap() < 1.0);
}

#[test]
fn seeded_random_games_are_reproducible() {
    let dir_a = tempdir("rand-a");
    let dir_b = tempdir("rand-b");
    for dir in [&dir_a, &dir_b] {
        let out = saddlekit(&["simulate", "--random", "3x4", "--seed", "7", "--steps", "50"], dir);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(
        read(&dir_a, "simulate_trajectory.csv"),
        read(&dir_b, "simulate_trajectory.csv")
    );
    assert_eq!(
        json(&dir_a, "simulate_summary.json")["matrix"],
        json(&dir_b, "simulate_summary.json")["matrix"]
    );
}

#[test]
fn gda_distance_trend_is_nondecreasing() {
    let dir = tempdir("gda");
    let out = saddlekit(
        &["simulate", "--game", "matching-pennies", "--method", "gda", "--eta", "0.1", "--steps", "100"],
        &dir,
    );
    assert!(out.status.success());
    let csv = read(&dir, "simulate_trajectory.csv");
    let distances: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|line| line.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(distances.len(), 101);
    for pair in distances.windows(2) {
        assert!(pair[1] >= pair[0] - 1e-12, "GDA distance to equilibrium must not shrink");
    }
}

#[test]
fn solve_warns_without_reduce_and_succeeds_with_it() {
    let dir = tempdir("solve-id");
    let out = saddlekit(
        &["solve", "--game", "identity2", "--epsilon", "1e-5", "--cycles", "6", "--steps", "200"],
        &dir,
    );
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("warning"), "expected a hypothesis warning, got: {stderr}");
    let summary = json(&dir, "solve_report.json");
    assert_eq!(summary["report"]["converged"], false);
    assert!(!summary["warnings"].as_array().unwrap().is_empty());

    let out = saddlekit(&["solve", "--game", "identity2", "--epsilon", "1e-5", "--reduce"], &dir);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&dir, "solve_report.json");
    assert_eq!(summary["report"]["converged"], true);
    assert!((summary["reduction"]["shift"].as_f64().unwrap() + 0.5).abs() < 1e-9);
    let x = summary["lifted_pair"]["x"].as_array().unwrap();
    assert!((x[0].as_f64().unwrap() - 0.5).abs() < 1e-4);
}

#[test]
fn solve_reaches_the_rotated_equilibrium() {
    let dir = tempdir("solve-rot");
    let out = saddlekit(&["solve", "--game", "rotated-mp", "--epsilon", "1e-4"], &dir);
    assert!(out.status.success());
    let summary = json(&dir, "solve_report.json");
    assert_eq!(summary["report"]["converged"], true);
    let x = summary["report"]["final_pair"]["x"].as_array().unwrap();
    assert!((x[0].as_f64().unwrap() - 0.25).abs() < 1e-3);
    assert!(summary["report"]["exploitability"].as_f64().unwrap() <= 1e-4);
}

#[test]
fn matrix_files_round_trip_through_solve() {
    let dir = tempdir("matrix-file");
    let path = dir.join("game.csv");
    std::fs::write(&path, "0,2\n-1,1\n").unwrap();
    let out = saddlekit(
        &["solve", "--matrix", path.to_str().unwrap(), "--epsilon", "1e-4", "--reduce"],
        &dir,
    );
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&dir, "solve_report.json");
    assert_eq!(summary["matrix"]["rows"], 2);
}

#[test]
fn spectrum_and_identities_and_oscillations_pass() {
    let dir = tempdir("suites");
    let out = saddlekit(&["spectrum"], &dir);
    assert!(out.status.success());
    let summary = json(&dir, "spectrum_summary.json");
    assert_eq!(summary["pass"], true);
    assert!(read(&dir, "spectrum.csv").starts_with("lambda,e,v\n"));

    let out = saddlekit(&["identities", "--sweep", "--samples", "200", "--seed", "3"], &dir);
    assert!(out.status.success());
    assert_eq!(json(&dir, "identities_report.json")["pass"], true);

    let out = saddlekit(&["oscillations", "--game", "matching-pennies", "--eta", "0.2"], &dir);
    assert!(out.status.success());
    let summary = json(&dir, "oscillations_summary.json");
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["spectrum"]["frequencies"].as_array().unwrap().len(), 1);
}

#[test]
fn discontinuity_reports_the_rate_gap() {
    let dir = tempdir("disc");
    let out = saddlekit(&["discontinuity", "--epsilon", "0.01", "--eta", "0.005", "--steps", "300"], &dir);
    assert!(out.status.success());
    let summary = json(&dir, "discontinuity_summary.json");
    assert_eq!(summary["pass"], true);
    let ratio = summary["lambda_ratio"].as_f64().unwrap();
    assert!((ratio - 1e4).abs() / 1e4 < 1e-6);
}

#[test]
fn env_var_sets_the_default_output_dir() {
    let dir = tempdir("envvar");
    let out = Command::new(env!("CARGO_BIN_EXE_saddlekit"))
        .args(["spectrum"])
        .env("SADDLEKIT_OUT", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("spectrum_summary.json").exists());
}

#[test]
fn bad_inputs_exit_nonzero() {
    let dir = tempdir("bad");
    let out = saddlekit(&["simulate", "--game", "no-such-game"], &dir);
    assert!(!out.status.success());

    // eta outside the stability region is rejected by the solver.
    let out = saddlekit(
        &["solve", "--game", "matching-pennies", "--eta", "0.3", "--epsilon", "1e-4"],
        &dir,
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("stability"));

    let out = saddlekit(&["solve", "--game", "xy", "--cycles", "3"], &dir);
    assert!(!out.status.success(), "--cycles without --steps must be rejected");
}
