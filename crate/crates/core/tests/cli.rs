//! End-to-end tests of the `exergy` binary: exit codes, output formats,
//! dead-state overrides and the validate subcommand.

use std::path::Path;
use std::process::{Command, Output};

use exergy::reference::REFERENCE_PLANT_JSON;

fn exergy_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_exergy"))
}

fn run(args: &[&str]) -> Output {
    exergy_bin().args(args).output().expect("spawn exergy")
}

fn write_reference(dir: &Path) -> String {
    let path = dir.join("plant.json");
    std::fs::write(&path, REFERENCE_PLANT_JSON).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn analyze_table_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let plant = write_reference(dir.path());
    let out = run(&["analyze", &plant]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Cooler"));
    assert!(text.contains("Whole system"));
}

#[test]
fn analyze_formats_agree_on_headline_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let plant = write_reference(dir.path());
    let json = run(&["analyze", &plant, "--format", "json"]);
    assert!(json.status.success());
    let report: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    let eta = report["system"]["eta_functional"].as_f64().unwrap();
    assert!((eta - 0.6412).abs() < 5e-4);

    let csv = run(&["analyze", &plant, "--format", "csv"]);
    assert!(csv.status.success());
    let text = String::from_utf8(csv.stdout).unwrap();
    let system_line = text
        .lines()
        .find(|l| l.starts_with("system,"))
        .expect("system row in csv");
    let eta_csv: f64 = system_line.split(',').nth(5).unwrap().parse().unwrap();
    assert_eq!(eta_csv, eta);
}

#[test]
fn analyze_with_matching_override_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let plant = write_reference(dir.path());
    let base = run(&["analyze", &plant, "--format", "json"]);
    let overridden = run(&["analyze", &plant, "--format", "json", "--t0-c", "15", "--p0-kpa", "100"]);
    assert!(base.status.success() && overridden.status.success());
    assert_eq!(base.stdout, overridden.stdout);
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = run(&["analyze", "/nonexistent/plant.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_format_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let plant = write_reference(dir.path());
    let out = run(&["analyze", &plant, "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flag_is_a_usage_error() {
    let out = run(&["analyze", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn semantic_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut file: serde_json::Value = serde_json::from_str(REFERENCE_PLANT_JSON).unwrap();
    // Point a component at a state id that does not exist.
    file["components"][0]["hot_in"] = "no-such-state".into();
    let path = dir.path().join("dangling.json");
    std::fs::write(&path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
    let out = run(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn validate_clean_file_reports_ok() {
    let dir = tempfile::tempdir().unwrap();
    let plant = write_reference(dir.path());
    let out = run(&["validate", &plant]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok: no violations");
}

#[test]
fn validate_flags_perturbed_mass_flow() {
    let dir = tempfile::tempdir().unwrap();
    let mut file: serde_json::Value = serde_json::from_str(REFERENCE_PLANT_JSON).unwrap();
    let states = file["states"].as_array_mut().unwrap();
    let s6 = states.iter_mut().find(|s| s["id"] == "6").unwrap();
    let mdot = s6["mdot_kg_s"].as_f64().unwrap();
    s6["mdot_kg_s"] = (mdot * 1.05).into();
    let path = dir.path().join("imbalanced.json");
    std::fs::write(&path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.starts_with("violation: ")));
    assert!(text.contains("mass"), "{text}");
}

#[test]
fn sweep_produces_requested_points() {
    let dir = tempfile::tempdir().unwrap();
    let mut file: serde_json::Value = serde_json::from_str(REFERENCE_PLANT_JSON).unwrap();
    // The embedded dataset carries precomputed exergies, which pin each
    // fluid's reference to the stated dead state. Replace them with an
    // equivalent separable (h0, s0) reference so the file is sweepable.
    let fluids: Vec<String> = file["fluids"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["id"].as_str().unwrap().to_owned())
        .collect();
    for (i, fluid) in fluids.iter().enumerate() {
        let s = file["states"]
            .as_array()
            .unwrap()
            .iter()
            .find(|s| s["fluid"] == fluid.as_str())
            .unwrap();
        let k0 = s["h_kj_kg"].as_f64().unwrap()
            - 288.15 * s["s_kj_kgk"].as_f64().unwrap()
            - s["eps_kj_kg"].as_f64().unwrap();
        let s0 = 1.0;
        file["fluids"][i]["reference"] =
            serde_json::json!({ "h0": k0 + 288.15 * s0, "s0": s0 });
    }
    for state in file["states"].as_array_mut().unwrap() {
        state.as_object_mut().unwrap().remove("eps_kj_kg");
    }
    let path = dir.path().join("sweepable.json");
    std::fs::write(&path, serde_json::to_string_pretty(&file).unwrap()).unwrap();
    let out = run(&[
        "sweep",
        path.to_str().unwrap(),
        "--t0-from-c",
        "5",
        "--t0-to-c",
        "25",
        "--t0-step-c",
        "5",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let series: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(series["mode"], "fixed_reference");
    assert_eq!(series["points"].as_array().unwrap().len(), 5);
    let etas: Vec<f64> = series["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["report"]["system"]["eta_functional"].as_f64().unwrap())
        .collect();
    assert!(etas.windows(2).all(|w| w[0] > w[1]), "eta should fall with T0: {etas:?}");
}

#[test]
fn sweep_rejects_pinned_reference() {
    let dir = tempfile::tempdir().unwrap();
    let plant = write_reference(dir.path());
    let out = run(&[
        "sweep", &plant, "--t0-from-c", "5", "--t0-to-c", "25", "--t0-step-c", "5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_rejects_nonpositive_step() {
    let dir = tempfile::tempdir().unwrap();
    let plant = write_reference(dir.path());
    let out = run(&[
        "sweep", &plant, "--t0-from-c", "25", "--t0-to-c", "5", "--t0-step-c", "-5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
