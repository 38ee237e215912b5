use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"
preset = "qubit-blockade"
cutoffs.optical = 2
cutoffs.mechanical = 3
integrator.t_final_times_g = 3.141592653589793
outputs.wigner_points = 11
convergence.enabled = false
"#;

fn zeno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeno-blockade"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn presets_are_listed() {
    let out = zeno(&["presets"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["blockade-two-phonon", "qubit-blockade", "perturbed-two-phonon", "perturbed-qubit", "multitone-fock"] {
        assert!(text.lines().any(|l| l == name), "{name}");
    }
}

#[test]
fn simulate_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = zeno(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["probabilities.csv", "wigner_final.csv", "summary.json"] {
        assert!(out_dir.join(file).is_file(), "{file}");
    }
}

#[test]
fn command_line_cutoffs_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("out");
    let out = zeno(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--cutoff-a",
        "1",
        "--cutoff-b",
        "2",
    ]);
    assert_eq!(code(&out), 0);
    let summary = fs::read_to_string(out_dir.join("summary.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(value["cutoffs"], serde_json::json!([1, 2]));
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("nonsense_key = 1\n{SMALL}"));
    let out = zeno(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let out = zeno(&["simulate", "--preset", "no-such-preset", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_config_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    let out = zeno(&["simulate", "--config", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
}

#[test]
fn failed_convergence_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("convergence.tolerance = 1e-12\n{}", SMALL.replace("convergence.enabled = false", "convergence.enabled = true")));
    let out_dir = dir.path().join("out");
    let out = zeno(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    // results are still written, flagged in the summary
    let summary = fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(summary.contains("\"convergence_failed\""));
}

#[test]
fn unstable_step_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = zeno(&["simulate", "--config", &cfg, "--out", dir.path().to_str().unwrap(), "--dt-per-period", "2"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn zeno_report_writes_the_partition() {
    let dir = tempfile::tempdir().unwrap();
    let out = zeno(&["zeno", "report", "--preset", "blockade-two-phonon", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    for file in ["spectrum.json", "partition.json", "torus.csv"] {
        assert!(dir.path().join(file).is_file(), "{file}");
    }
    let partition: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("partition.json")).unwrap()).unwrap();
    assert!(partition["class_count"].as_u64().unwrap() > 1);
}

#[test]
fn input_source_is_required() {
    let out = zeno(&["simulate"]);
    assert_eq!(code(&out), 2);
}
