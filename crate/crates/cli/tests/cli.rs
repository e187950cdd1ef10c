//! End-to-end tests of the command-line interface: each test runs the real
//! binary and inspects bytes and exit codes, since those are the contract.

use std::process::{Command, Output};
use taukit::model::{EngineKind, Model};
use taukit::tau::{tau_model, TauSeries};

fn taukit_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taukit"))
        .args(args)
        .env_remove("TAUKIT_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = taukit_cmd(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn tau_json_round_trips_through_the_library() {
    let text = stdout_of(&["tau", "--model", "kw", "--engine", "cutjoin", "--degree", "3"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "taukit.tau.v1");
    let parsed = TauSeries::from_json_value(&v).unwrap();
    assert_eq!(parsed, tau_model(Model::Kw, EngineKind::CutJoin, 3).unwrap());
}

#[test]
fn output_bytes_do_not_depend_on_thread_count() {
    for args in [
        vec!["tau", "--model", "bgw", "--degree", "6"],
        vec!["verify", "--model", "kw", "--suite", "virasoro,miwa", "--degree", "6"],
    ] {
        let single = stdout_of(&[args.clone(), vec!["--threads", "1"]].concat());
        let multi = stdout_of(&[args.clone(), vec!["--threads", "4"]].concat());
        let again = stdout_of(&[args, vec!["--threads", "4"]].concat());
        assert_eq!(single, multi);
        assert_eq!(multi, again);
    }
}

#[test]
fn verify_reports_all_pass_for_the_committed_models() {
    let text = stdout_of(&[
        "verify",
        "--model",
        "kw",
        "--suite",
        "virasoro,hirota,reduction,factorization,miwa",
        "--degree",
        "6",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "taukit.report.v1");
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["pass"] == true), "{text}");

    let text = stdout_of(&[
        "verify", "--model", "bgw", "--suite", "virasoro,hirota,reduction,miwa", "--degree", "6",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true), "{text}");
}

#[test]
fn quartic_reduction_constants_are_recorded_in_the_report() {
    let text = stdout_of(&[
        "verify", "--model", "gkm:2", "--suite", "reduction", "--degree", "8", "--out", "csv",
    ]);
    let body = text.lines().nth(1).unwrap();
    assert!(body.contains("c_3 ="), "{text}");
    assert!(body.contains("c_6 ="), "{text}");
    assert!(body.contains(",true,"), "{text}");
}

#[test]
fn parameter_binding_trivializes_the_parametric_series() {
    let text = stdout_of(&["tau", "--model", "bgw", "--degree", "4", "--subst", "N=1/2"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let components = v["components"].as_array().unwrap();
    assert_eq!(components.len(), 1);
    assert_eq!(components[0]["grade"], 0);
}

#[test]
fn operator_dump_matches_the_committed_normal_form() {
    let text = stdout_of(&["ops", "--model", "gkm:1", "--which", "R"]);
    assert_eq!(
        text.trim_end(),
        "-3/2*z^-3*D^2 + 3*z^-3*D - 5/8*z^-3 + 1/2*z^-6*D^3 - 15/4*z^-6*D^2 + 59/8*z^-6*D - 45/16*z^-6"
    );
}

#[test]
fn unusable_flags_exit_with_code_2() {
    for args in [
        vec!["tau", "--model", "nosuchmodel", "--degree", "3"],
        vec!["tau", "--model", "kw", "--degree", "3", "--subst", "M=1"],
        vec!["tau", "--model", "gkm:2", "--engine", "cutjoin", "--degree", "4"],
        vec!["verify", "--model", "kw", "--suite", "nosuchsuite", "--degree", "3"],
        vec!["verify", "--model", "gkm:2", "--suite", "virasoro", "--degree", "4"],
        vec!["ops", "--model", "kw", "--which", "Z"],
    ] {
        let out = taukit_cmd(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty(), "args {args:?}");
    }
}

#[test]
fn relative_output_paths_resolve_under_the_output_directory_override() {
    let dir = std::env::temp_dir().join(format!("taukit-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_taukit"))
        .args(["tau", "--model", "kw", "--degree", "3", "--out-path", "series.json"])
        .env("TAUKIT_OUT_DIR", &dir)
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    let written = std::fs::read_to_string(dir.join("series.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&written).unwrap();
    assert_eq!(v["degree"], 3);
    std::fs::remove_dir_all(&dir).unwrap();
}
