use std::fs;
use std::process::Command;

use dirac_nlcs::cli::{run, Command as Task, RunConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-nlcs"))
}

#[test]
fn levels_to_stdout() {
    let out = bin().args(["levels", "--n", "4"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# config: {"));
    let rows: Vec<_> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 6);
}

#[test]
fn repeated_runs_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["uncertainty", "--family", "identity,shifted2", "--alpha-abs", "0:4:9", "--alpha-phase", "0,1"];
    let mut outputs = Vec::new();
    for (i, jobs) in ["1", "3"].iter().enumerate() {
        let path = dir.path().join(format!("u{i}.csv"));
        let status = bin()
            .args(args)
            .args(["--jobs", jobs, "-o"])
            .arg(&path)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert!(fs::read_dir(dir.path())
        .unwrap()
        .all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".partial")));
}

#[test]
fn zeta_and_strain_together_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    let out = bin()
        .args(["energy", "--zeta", "0.8", "--strain-dir", "x", "--epsilon", "0.21", "-o"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    assert!(!path.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn bad_values_exit_with_config_error() {
    for args in [
        vec!["energy", "--zeta", "-1"],
        vec!["uncertainty", "--family", "bogus"],
        vec!["nlcs-density", "--grid", "1:0:10"],
        vec!["figure", "fig99"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["maxima", "--n", "0:3", "--format", "json"])
        .env("DIRAC_NLCS_OUT", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(dir.path().join("maxima.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(value["config"].is_object());
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::new(Task::Occupation);
    config.alpha_abs = vec![1.0, 2.0];
    let cfg_path = dir.path().join("c.json");
    fs::write(&cfg_path, config.to_json()).unwrap();
    assert_eq!(RunConfig::from_json(&config.to_json()).unwrap(), config);

    let out_path = dir.path().join("o.csv");
    let status = bin()
        .arg("occupation")
        .arg("--config")
        .arg(&cfg_path)
        .arg("-o")
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(status.success());
    let direct = run(&config, Some(1)).unwrap().render();
    assert_eq!(fs::read_to_string(&out_path).unwrap(), direct);
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("c.json");
    let mut value: serde_json::Value = serde_json::from_str(&RunConfig::new(Task::Energy).to_json()).unwrap();
    value["colour"] = serde_json::json!(1);
    fs::write(&cfg_path, value.to_string()).unwrap();
    let out = bin().arg("energy").arg("--config").arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
