//! End-to-end tests of the `roadfield` binary: exit codes, artifact layout,
//! error reporting, determinism, and the quiet flag.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_roadfield"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary must launch")
}

const CELL_CONFIG: &str = r#"{
    "model": {"D": 1.0, "d": 1.0, "nu": 1.0, "mu": 1.0},
    "reaction": {"kind": "homogeneous", "a0": 1.0},
    "numerics": {"family": "cell", "hx": 0.25}
}"#;

const HOSTILE_SWEEP_CONFIG: &str = r#"{
    "model": {"D": 1.0, "d": 1.0, "nu": 1.0, "mu": 1.0},
    "reaction": {"kind": "homogeneous", "a0": -1.0, "M": 0.5},
    "numerics": {"hx": 0.25, "hy": 0.25, "sizes": [1.0, 2.0, 4.0]}
}"#;

#[test]
fn help_and_version_exit_cleanly() {
    let help = run(&["--help"]);
    assert!(help.status.success());
    let text = String::from_utf8_lossy(&help.stdout);
    for sub in ["eigen", "sweep", "evolve", "classify", "road-effect", "amplitude", "audit", "validate"]
    {
        assert!(text.contains(sub), "--help must list `{sub}`");
    }
    assert!(run(&["--version"]).status.success());
}

#[test]
fn usage_errors_exit_two() {
    // No subcommand.
    assert_eq!(run(&[]).status.code(), Some(2));
    // Unknown flag.
    assert_eq!(run(&["eigen", "--config", "x.json", "--bogus"]).status.code(), Some(2));
    // Missing required --config.
    assert_eq!(run(&["eigen"]).status.code(), Some(2));
}

#[test]
fn eigen_writes_artifacts_and_respects_quiet() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.json", CELL_CONFIG);
    let out = tmp.path().join("out");

    let result = run(&["eigen", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("lambda"), "progress line expected, got: {stdout}");

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("eigen.json")).unwrap()).unwrap();
    assert!((report["lambda"].as_f64().unwrap() + 1.0).abs() < 1e-10);
    assert_eq!(report["family"], "cell");
    assert!(out.join("eigenvector_field.csv").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["subcommand"], "eigen");
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);

    // Quiet run: empty stdout, same exit code.
    let out2 = tmp.path().join("out-quiet");
    let result = run(&[
        "eigen",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out2.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(result.status.code(), Some(0));
    assert!(result.stdout.is_empty(), "quiet run must not print");
}

#[test]
fn identical_runs_produce_identical_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.json", HOSTILE_SWEEP_CONFIG);
    let (out_a, out_b) = (tmp.path().join("a"), tmp.path().join("b"));
    for out in [&out_a, &out_b] {
        let result = run(&[
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--quiet",
        ]);
        assert_eq!(result.status.code(), Some(0), "{}", String::from_utf8_lossy(&result.stderr));
    }
    for name in ["sweep.csv", "sweep.json"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} must be byte-identical across reruns");
    }
    // Manifests share the config hash (wall clock may differ).
    let ma: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_a.join("manifest.json")).unwrap()).unwrap();
    let mb: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(ma["config_sha256"], mb["config_sha256"]);

    // The sweep CSV has a header plus one row per size.
    let csv = fs::read_to_string(out_a.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("size,lambda,residual,iters"));
}

#[test]
fn config_type_errors_report_the_json_pointer() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.json",
        r#"{"model": {"D": 1.0, "d": "one", "nu": 1.0, "mu": 1.0},
            "reaction": {"kind": "homogeneous", "a0": 1.0}}"#,
    );
    let out = tmp.path().join("out");
    let result = run(&["eigen", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.contains("/model/d"), "pointer missing from: {stderr}");
    assert!(!out.exists(), "failed config must not create artifacts");
}

#[test]
fn missing_config_file_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let result = run(&[
        "classify",
        "--config",
        tmp.path().join("absent.json").to_str().unwrap(),
        "--out",
        tmp.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("cannot read config"));
}

#[test]
fn validate_reports_failed_hypotheses_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.json",
        r#"{
            "model": {"D": 1.0, "d": 1.0, "nu": 1.0, "mu": 1.0},
            "reaction": {
                "kind": "custom",
                "a_samples": [0.1, 0.1, 0.1, 0.1],
                "f_table": [[0.5, 1.0, 2.0, 4.0], [0.5, 1.0, 2.0, 4.0],
                            [0.5, 1.0, 2.0, 4.0], [0.5, 1.0, 2.0, 4.0]],
                "v_max": 3.0,
                "M": 1.0
            }
        }"#,
    );
    let out = tmp.path().join("out");
    let result =
        run(&["validate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    // The report and manifest survive a failed validation.
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("validate.json")).unwrap()).unwrap();
    assert_eq!(report["all_passed"], false);
    assert!(report["conventions"].as_array().unwrap().len() == 2);
    assert!(out.join("manifest.json").exists());
    assert!(String::from_utf8_lossy(&result.stdout).contains("FAIL"));
}

#[test]
fn validate_passes_on_a_sound_reaction() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "run.json", CELL_CONFIG);
    let out = tmp.path().join("out");
    let result =
        run(&["validate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0), "{}", String::from_utf8_lossy(&result.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("validate.json")).unwrap()).unwrap();
    assert_eq!(report["all_passed"], true);
}

#[test]
fn amplitude_precondition_failure_discards_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    // Mean-positive growth: the amplitude scan refuses to run.
    let cfg = write_config(
        tmp.path(),
        "run.json",
        r#"{
            "model": {"D": 1.0, "d": 1.0, "nu": 1.0, "mu": 1.0},
            "reaction": {"kind": "logistic-periodic", "a0": 0.5, "a1": 0.25},
            "numerics": {"hx": 0.25, "hy": 0.25, "sizes": [1.0, 2.0]}
        }"#,
    );
    let out = tmp.path().join("out");
    let result =
        run(&["amplitude", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&result.stderr).contains("mean-negative"));
    assert!(!out.join("manifest.json").exists(), "aborted run must not leave a manifest");
    assert!(!out.join("amplitude.csv").exists());
}

#[test]
fn evolve_records_a_trajectory_and_final_state() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.json",
        r#"{
            "model": {"D": 1.0, "d": 1.0, "nu": 1.0, "mu": 1.0},
            "reaction": {"kind": "homogeneous", "a0": -1.0, "M": 0.5},
            "numerics": {"hx": 0.25, "hy": 0.25, "dyn_height": 2.0, "periods": 2, "t_max": 60.0},
            "outputs": {"record_every": 200}
        }"#,
    );
    let out = tmp.path().join("out");
    let result =
        run(&["evolve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0), "{}", String::from_utf8_lossy(&result.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("evolve.json")).unwrap()).unwrap();
    assert_eq!(report["kind"], "DecayedToZero");
    assert!(report["decay_time"].as_f64().unwrap() > 0.0);
    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,sup_road,sup_field,min_road,min_field,residual"));
    assert!(csv.lines().count() > 2);
    assert!(out.join("final_road.csv").exists());
    assert!(out.join("final_field.csv").exists());
}

#[test]
fn classify_agrees_on_a_quick_hostile_medium() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "run.json",
        r#"{
            "model": {"D": 1.0, "d": 1.0, "nu": 1.0, "mu": 1.0},
            "reaction": {"kind": "homogeneous", "a0": -1.0, "M": 0.5},
            "numerics": {"hx": 0.25, "hy": 0.25, "sizes": [2.0, 4.0],
                          "dyn_height": 2.0, "periods": 2, "t_max": 60.0}
        }"#,
    );
    let out = tmp.path().join("out");
    let result =
        run(&["classify", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(0), "{}", String::from_utf8_lossy(&result.stderr));
    let verdict: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("classify.json")).unwrap()).unwrap();
    assert_eq!(verdict["sign"], "Positive");
    assert_eq!(verdict["predicted"], "Extinction");
    assert_eq!(verdict["dynamics_kind"], "DecayedToZero");
    assert_eq!(verdict["agreement"], true);
    assert!(out.join("sweep.csv").exists());
}
