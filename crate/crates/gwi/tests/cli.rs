//! End-to-end tests of the command-line driver: output payloads, the
//! exit-code contract, determinism, and schema conformance.

use std::process::{Command, Output};

use gwi::lhv::Behavior;
use gwi::observables::{Plane, SettingSet};
use gwi::qstate::PureState;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_stdout(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../schemas/run_report.schema.json"
    ))
    .expect("schema file ships with the repo");
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

fn assert_valid(report: &serde_json::Value) {
    let schema = schema();
    let msgs: Vec<String> = match schema.validate(report) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{e}")).collect(),
    };
    panic!("schema violations: {msgs:?}");
}

#[test]
fn evaluate_ghz_at_quoted_angles() {
    let out = run(&[
        "evaluate", "--state", "ghz", "--n", "4", "--plane", "xy",
        "--ghz-reduced", "0.6981", "2.2427",
    ]);
    let report = json_stdout(&out);
    assert_valid(&report);
    let v = report["outputs"]["value"].as_f64().unwrap();
    assert!((v - 5.656848).abs() < 1e-3, "got {v}");
    assert_eq!(report["outputs"]["violated"], serde_json::json!(true));
    assert_eq!(report["outputs"]["bound"], serde_json::json!(4.0));
}

#[test]
fn evaluate_degrees_flag() {
    let rad = run(&[
        "evaluate", "--state", "ghz", "--n", "4", "--plane", "xy",
        "--ghz-reduced", "0.6981", "2.2427",
    ]);
    let deg = run(&[
        "evaluate", "--state", "ghz", "--n", "4", "--plane", "xy", "--degrees",
        "--ghz-reduced", "39.99818368", "128.49724471",
    ]);
    let vr = json_stdout(&rad)["outputs"]["value"].as_f64().unwrap();
    let vd = json_stdout(&deg)["outputs"]["value"].as_f64().unwrap();
    assert!((vr - vd).abs() < 1e-4, "{vr} vs {vd}");
}

#[test]
fn evaluate_maximally_mixed_never_violates() {
    let out = run(&[
        "evaluate", "--state", "mixed:0", "--n", "4", "--plane", "xy",
        "--angles", "0.1", "0.9", "0.2", "1.1", "0.3", "1.3", "0.4", "1.5",
    ]);
    let report = json_stdout(&out);
    assert_valid(&report);
    assert!(report["outputs"]["value"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(report["outputs"]["violated"], serde_json::json!(false));
}

#[test]
fn evaluate_w_at_quoted_tuple() {
    // the reduced W parametrization [0, a, b, a] / [p1, A, B, A] spelled out
    let out = run(&[
        "evaluate", "--state", "w", "--n", "4", "--plane", "xz", "--angles",
        "0", "2.271", "0.131", "2.298", "-2.557", "-0.892", "0.131", "2.298",
    ]);
    let report = json_stdout(&out);
    assert_valid(&report);
    let v = report["outputs"]["value"].as_f64().unwrap();
    assert!((v - 6.5603).abs() < 1e-3, "got {v}");
}

#[test]
fn evaluate_settings_file_and_probability_form() {
    let dir = std::env::temp_dir().join("gwi-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("settings.json");
    std::fs::write(
        &path,
        r#"{"plane": "XY", "pairs": [[0.174525, 2.417225], [0.174525, 2.417225],
            [0.174525, 2.417225], [0.174525, 2.417225]]}"#,
    )
    .unwrap();
    let out = run(&[
        "evaluate", "--state", "ghz", "--n", "4", "--form", "probability",
        "--settings", path.to_str().unwrap(),
    ]);
    let report = json_stdout(&out);
    assert_valid(&report);
    // v_c - 4 = 16 v_p at the near-optimal angles
    let v = report["outputs"]["value"].as_f64().unwrap();
    assert!((v - (5.656848 - 4.0) / 16.0).abs() < 1e-3, "got {v}");
    assert_eq!(report["outputs"]["bound"], serde_json::json!(0.0));
}

#[test]
fn evaluate_bloch_settings_file() {
    let dir = std::env::temp_dir().join("gwi-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bloch.json");
    // CHSH-optimal directions for the singlet
    let s = std::f64::consts::FRAC_1_SQRT_2;
    std::fs::write(
        &path,
        format!(
            r#"{{"bloch_pairs": [[[0,0,1],[1,0,0]], [[{s},0,-{s}],[{s},0,{s}]]]}}"#
        ),
    )
    .unwrap();
    let out = run(&["evaluate", "--state", "singlet", "--n", "2", "--settings",
        path.to_str().unwrap()]);
    let report = json_stdout(&out);
    assert_valid(&report);
    let v = report["outputs"]["value"].as_f64().unwrap();
    assert!((v - 2.0 * 2f64.sqrt()).abs() < 1e-9, "got {v}");
}

#[test]
fn optimize_reduced_objectives() {
    let out = run(&["optimize", "--objective", "ghz-reduced", "--restarts", "64",
        "--seed", "7"]);
    let report = json_stdout(&out);
    assert_valid(&report);
    let best = report["outputs"]["best_value"].as_f64().unwrap();
    assert!((best - 4.0 * 2f64.sqrt()).abs() < 1e-6, "got {best}");

    let out = run(&["optimize", "--objective", "cluster-reduced"]);
    let best = json_stdout(&out)["outputs"]["best_value"].as_f64().unwrap();
    assert!(best >= 5.7442 - 1e-3, "got {best}");
}

#[test]
fn optimize_full_ghz_xy() {
    let out = run(&[
        "optimize", "--objective", "full", "--state", "ghz", "--n", "4",
        "--plane", "xy", "--restarts", "64",
    ]);
    let report = json_stdout(&out);
    assert_valid(&report);
    let best = report["outputs"]["best_value"].as_f64().unwrap();
    assert!(best >= 5.6568 - 1e-3, "got {best}");
}

#[test]
fn optimize_config_file() {
    let dir = std::env::temp_dir().join("gwi-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("config.json");
    std::fs::write(&path, r#"{"restarts": 8, "seed": 5, "tol": 1e-9}"#).unwrap();
    let a = run(&["optimize", "--objective", "w-reduced", "--config",
        path.to_str().unwrap()]);
    let b = run(&["optimize", "--objective", "w-reduced", "--restarts", "8",
        "--seed", "5"]);
    let va = json_stdout(&a)["outputs"].clone();
    let vb = json_stdout(&b)["outputs"].clone();
    assert_eq!(va, vb);
}

#[test]
fn lhv_bound_and_identity() {
    let out = run(&["lhv", "bound", "--n", "4", "--form", "correlator"]);
    let report = json_stdout(&out);
    assert_valid(&report);
    assert_eq!(report["outputs"]["bound"], serde_json::json!({"num": 4, "den": 1}));

    let out = run(&["lhv", "bound", "--n", "4", "--form", "probability"]);
    assert_eq!(json_stdout(&out)["outputs"]["bound_f64"], serde_json::json!(0.0));

    let out = run(&["lhv", "identity", "--n", "2"]);
    let report = json_stdout(&out);
    assert_valid(&report);
    assert_eq!(report["outputs"]["nonneg"], serde_json::json!(true));
    assert_eq!(report["outputs"]["count"], serde_json::json!(8));
}

#[test]
fn lhv_jpd_singlet_infeasible_product_feasible() {
    let dir = std::env::temp_dir().join("gwi-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let pi = std::f64::consts::PI;
    let settings = SettingSet::from_angles(
        Plane::Xz,
        &[(0.0, pi / 2.0), (3.0 * pi / 4.0, pi / 4.0)],
    )
    .unwrap();

    let singlet = Behavior::from_state(&PureState::singlet(), &settings).unwrap();
    let path = dir.join("singlet_chsh.json");
    std::fs::write(&path, serde_json::to_string(&singlet.to_json()).unwrap()).unwrap();
    let out = run(&["lhv", "jpd", "--behavior", path.to_str().unwrap()]);
    let report = json_stdout(&out);
    assert_valid(&report);
    assert_eq!(report["outputs"]["feasible"], serde_json::json!(false));
    assert!(report["outputs"]["violated"]["value"].as_f64().unwrap() > 0.0);

    let mut amps = vec![num_complex::Complex64::ZERO; 4];
    amps[0] = num_complex::Complex64::new(1.0, 0.0);
    let product =
        Behavior::from_state(&PureState::new(2, amps).unwrap(), &settings).unwrap();
    let path = dir.join("product.json");
    std::fs::write(&path, serde_json::to_string(&product.to_json()).unwrap()).unwrap();
    let out = run(&["lhv", "jpd", "--behavior", path.to_str().unwrap()]);
    let report = json_stdout(&out);
    assert_valid(&report);
    assert_eq!(report["outputs"]["feasible"], serde_json::json!(true));
}

#[test]
fn visibility_thresholds() {
    for (state, target) in [("ghz", 0.7071), ("cluster4", 0.6964), ("w", 0.6097)] {
        let out = run(&["visibility", "--state", state, "--n", "4"]);
        let report = json_stdout(&out);
        assert_valid(&report);
        let t = report["outputs"]["threshold"].as_f64().unwrap();
        assert!((t - target).abs() < 1e-3, "{state}: got {t}, want {target}");
    }
}

#[test]
fn reproduce_json_passes_and_is_deterministic() {
    let a = run(&["reproduce", "--format", "json"]);
    let b = run(&["reproduce", "--format", "json"]);
    let ra = json_stdout(&a);
    let rb = json_stdout(&b);
    assert_valid(&ra);
    assert_eq!(ra["outputs"], rb["outputs"], "payload differs between runs");
    assert_eq!(ra["outputs"]["all_pass"], serde_json::json!(true));
}

#[test]
fn reproduce_csv_and_markdown() {
    let out = run(&["reproduce", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "name,value,target,tolerance,pass");
    assert!(lines.clone().count() > 20);
    assert!(lines.all(|l| l.split(',').count() == 5));

    let out = run(&["reproduce", "--format", "markdown"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("| max_violation_ghz4 |"));
    assert!(text.contains("overall: **pass**"));
}

#[test]
fn exit_code_contract() {
    // 64: usage errors
    let out = run(&["evaluate", "--state", "nonsense", "--n", "4", "--plane", "xy",
        "--angles", "0", "0", "0", "0", "0", "0", "0", "0"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["evaluate", "--state", "ghz", "--n", "4"]);
    assert_eq!(out.status.code(), Some(64), "no settings given");

    // 65: domain/validation errors
    let out = run(&["lhv", "bound", "--n", "9"]);
    assert_eq!(out.status.code(), Some(65), "capacity exceeded");
    let out = run(&["evaluate", "--state", "ghz", "--n", "4", "--plane", "xy",
        "--angles", "0.1", "0.2"]);
    assert_eq!(out.status.code(), Some(65), "arity mismatch");

    // 0: help
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
