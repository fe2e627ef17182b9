// Copyright 2026 The qmap Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use qmap::fuzz::fuzz_scenarios;
use serde_json::Value;

fn qmap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmap")).args(args).env_remove("QMAP_SEED").output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn holds(report: &Value, property: &str) -> bool {
    report["verdicts"]["verdicts"].as_array().unwrap().iter().find(|v| v["property"] == property).unwrap()["holds"]
        .as_bool()
        .unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap().lines().map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn eternal_nm_report() {
    let r = json(&qmap(&["analyze", "--preset", "eternal_nm", "--t-max", "20"]));
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["scenario", "config", "verdicts", "choi", "oracle", "asymptotics", "seed"] {
        assert!(keys.contains(&k), "{keys:?}");
    }
    assert!(holds(&r, "CP") && holds(&r, "NM") && holds(&r, "P"));
    assert!(!holds(&r, "QM") && !holds(&r, "M"));
    assert_eq!(r["choi"].as_array().unwrap().len(), 2000);
    assert_eq!(r["oracle"]["agrees_with_classifier"], true);
}

#[test]
fn lossy_cavity_report() {
    let r = json(&qmap(&["analyze", "--preset", "lossy_cavity", "--param", "gamma=1", "--no-oracle"]));
    for p in ["M", "QM", "CP", "P"] {
        assert!(holds(&r, p), "{p}");
    }
    assert!(!holds(&r, "NM"));
    assert!(r["oracle"].is_null());
}

#[test]
fn reports_are_byte_identical() {
    let args = ["analyze", "--preset", "parametric_alpha", "--param", "alpha=0.7", "--grid", "300"];
    let a = qmap(&args);
    let b = qmap(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn seed_environment_overrides_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_qmap"))
        .args(["analyze", "--preset", "identity", "--grid", "50", "--seed", "5"])
        .env("QMAP_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 11);
    assert_eq!(json(&qmap(&["analyze", "--preset", "identity", "--grid", "50", "--seed", "5"]))["seed"], 5);
}

#[test]
fn missing_scenario_file_exits_one() {
    assert_eq!(qmap(&["analyze", "--scenario", "missing.json"]).status.code(), Some(1));
}

#[test]
fn malformed_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"rates": {"gamma_plus": "1 +", "gamma_minus": "0", "Gamma": "1"}}"#).unwrap();
    assert_eq!(qmap(&["analyze", "--scenario", path.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_zero() {
    assert_eq!(qmap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qmap(&["analyze", "--preset", "identity", "--preset", "x"]).status.code(), Some(1));
    assert_eq!(qmap(&["analyze"]).status.code(), Some(1));
    assert_eq!(qmap(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_config_exits_one() {
    assert_eq!(qmap(&["analyze", "--preset", "identity", "--grid", "1"]).status.code(), Some(1));
    assert_eq!(qmap(&["analyze", "--preset", "identity", "--t-max", "-1"]).status.code(), Some(1));
    assert_eq!(qmap(&["analyze", "--preset", "identity", "--horizon", "5"]).status.code(), Some(1));
}

#[test]
fn report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = qmap(&["analyze", "--preset", "p_not_cp", "--grid", "200", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(holds(&r, "P") && !holds(&r, "CP"));
}

#[test]
fn unwritable_output_exits_one() {
    let out = qmap(&["analyze", "--preset", "identity", "--grid", "20", "--out", "/nonexistent/dir/r.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parametric_sweep_flips_above_one_half() {
    let rows = csv_rows(&qmap(&[
        "sweep",
        "--preset",
        "parametric_alpha",
        "--vary",
        "alpha",
        "--from",
        "0",
        "--to",
        "1",
        "--steps",
        "21",
    ]));
    assert_eq!(rows[0][..6], ["value", "M", "QM", "CP", "P", "NM"]);
    assert_eq!(rows.len(), 22);
    for row in &rows[1..] {
        let alpha: f64 = row[0].parse().unwrap();
        let expect = if alpha <= 0.5 { "true" } else { "false" };
        assert_eq!(row[2..5], [expect, expect, expect], "alpha {alpha}");
    }
}

#[test]
fn lossy_cavity_sweep_is_constant() {
    let rows = csv_rows(&qmap(&[
        "sweep",
        "--preset",
        "lossy_cavity",
        "--vary",
        "gamma",
        "--from",
        "0.1",
        "--to",
        "2",
        "--steps",
        "11",
    ]));
    for row in &rows[1..] {
        assert_eq!(row[1..6], ["true", "true", "true", "true", "false"], "{row:?}");
    }
}

#[test]
fn sweep_over_absent_parameter_fails() {
    let out = qmap(&["sweep", "--preset", "parametric_alpha", "--vary", "beta", "--from", "0", "--to", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta"));
}

#[test]
fn csv_cells_have_nine_significant_digits() {
    let rows = csv_rows(&qmap(&[
        "evolve",
        "--preset",
        "eternal_nm",
        "--t-max",
        "3",
        "--grid",
        "31",
        "--x0",
        "0.6",
        "--z0",
        "0.8",
    ]));
    assert_eq!(rows[0], ["t", "x", "y", "z", "norm_sqr"]);
    for cell in rows[1..].iter().flatten() {
        let mantissa = cell.split('e').next().unwrap();
        let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
        let significant = digits.trim_start_matches('0');
        assert!(cell == "0" || significant.len() == 9, "{cell}");
        cell.parse::<f64>().unwrap();
    }
}

#[test]
fn trajectories_stay_in_range_at_one_half() {
    let rows = csv_rows(&qmap(&["trajectories", "--alpha", "0.5", "--t-max", "10", "--grid", "1001"]));
    assert_eq!(rows[0].len(), 10);
    assert_eq!(rows[0][1], "z_A=-1.00000000");
    for row in &rows[1..] {
        for z in &row[1..] {
            let z: f64 = z.parse().unwrap();
            assert!((-1.0..=1.0 + 1e-12).contains(&z), "{z}");
        }
    }
}

#[test]
fn trajectories_at_seven_tenths() {
    let rows = csv_rows(&qmap(&["trajectories", "--alpha", "0.7", "--z0", "0.75,1", "--t-max", "3", "--grid", "3001"]));
    let col = |j: usize| rows[1..].iter().map(|r| r[j].parse::<f64>().unwrap()).collect::<Vec<_>>();
    let (a075, a1) = (col(1), col(2));
    assert!(a075.iter().all(|&z| z <= 1.0));
    let (k, peak) = a1.iter().enumerate().fold((0, f64::MIN), |b, (k, &z)| if z > b.1 { (k, z) } else { b });
    // 0.7 + 0.7·e^{−4/7} at t = 4/7
    assert!((peak - (0.7 + 0.7 * (-4.0f64 / 7.0).exp())).abs() < 1e-6, "{peak}");
    let t: f64 = rows[k + 1][0].parse().unwrap();
    assert!((t - 4.0 / 7.0).abs() <= 1e-3, "{t}");
}

#[test]
fn trajectories_accept_negative_leading_z0() {
    let rows = csv_rows(&qmap(&["trajectories", "--z0", "-1,0.5", "--grid", "2"]));
    assert_eq!(rows[0], ["t", "z_A=-1.00000000", "z_A=0.500000000"]);
}

#[test]
fn trajectories_reject_out_of_range_inputs() {
    assert_eq!(qmap(&["trajectories", "--alpha", "1.5"]).status.code(), Some(1));
    assert_eq!(qmap(&["trajectories", "--z0", "1.5"]).status.code(), Some(1));
}

#[test]
fn asymptote_verifies_parametric_equilibrium() {
    let r = json(&qmap(&[
        "asymptote",
        "--preset",
        "parametric_alpha",
        "--horizon",
        "30",
        "--verify",
        "--x0",
        "0.6",
        "--z0",
        "-0.8",
    ]));
    assert_eq!(r["prediction"]["kind"], "converges_to");
    assert!((r["prediction"]["state"]["z"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert_eq!(r["check"]["matches"], true);
}

#[test]
fn fuzzed_scenarios_never_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for sc in fuzz_scenarios(2718, 40) {
        let path = dir.path().join(format!("{}.json", sc.name()));
        std::fs::write(&path, serde_json::to_string(&sc.to_document()).unwrap()).unwrap();
        let out = qmap(&["analyze", "--scenario", path.to_str().unwrap(), "--grid", "400", "--no-oracle"]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", sc.name(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn scenario_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(
        &path,
        r#"{"name": "cavity", "params": {"g": 2}, "rates": {"gamma_plus": "g", "gamma_minus": "g", "Gamma": "g/2"}}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let r = json(&qmap(&["analyze", "--scenario", p, "--param", "g=0.5", "--grid", "100", "--no-oracle"]));
    assert_eq!(r["scenario"]["params"]["g"], 0.5);
    assert!(holds(&r, "M"));
    assert!(Path::new(p).exists());
}
