use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn example(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn wavenf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavenf")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn water_wave_quartic_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nf");
    let o = wavenf(&["normal-form", "--model", example("waterwaves.toml").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&out.join("normal_form.json"));
    let rows = v["table"].as_array().unwrap();
    let u4 = rows.iter().find(|r| r["order"] == 2 && r["term"] == "<u^4>").unwrap();
    assert_eq!(u4["coefficient"], "-1/64");
    assert_eq!(v["verified"], true);
    assert_eq!(v["header"]["tool"], "wavenf");
    assert_eq!(v["header"]["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn zero_model_has_zero_normal_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavenf(&["normal-form", "--model", example("zero.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&dir.path().join("normal_form.json"));
    for (_, z) in v["z"].as_object().unwrap() {
        assert!(z["terms"].as_array().unwrap().is_empty());
    }
    assert!(v["table"].as_array().unwrap().is_empty());
}

#[test]
fn hierarchy_report_for_fpu_files() {
    for file in ["fpu.toml", "fpu_five_sixths.toml"] {
        let dir = tempfile::tempdir().unwrap();
        let o = wavenf(&[
            "normal-form",
            "--model",
            example(file).to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--check-hierarchy",
        ]);
        assert_eq!(code(&o), 0);
        let v = json(&dir.path().join("hierarchy.json"));
        assert_eq!(v["applicable"], true);
        // The u u_x^2 term of the quartic normal form is twice the I3 share
        // for every beta, so no file is a hierarchy member.
        assert_eq!(v["member"], false, "{file}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("member = false"));
    }
}

#[test]
fn outputs_are_deterministic() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let o = wavenf(&["normal-form", "--model", example("fpu.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        std::fs::read(dir.path().join("normal_form.json")).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn fpu_simulation_decays_monotonically() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavenf(&["simulate", "fpu", "--N", "32", "--k0", "1", "--alpha", "0.25", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("summary.json"));
    assert_eq!(v["monotone"], true);
    assert!(v["fit"]["r2"].as_f64().unwrap() >= 0.9);
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("# wavenf "));
    assert!(csv.lines().nth(1).unwrap().starts_with("t,E1,E2"));
    assert!(dir.path().join("spectrum.gp").exists());
}

#[test]
fn fpu_config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavenf(&[
        "simulate",
        "fpu",
        "--config",
        example("localization.toml").to_str().unwrap(),
        "--N",
        "16",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&dir.path().join("summary.json"))["mu"], 1.0 / 16.0);
}

#[test]
fn linear_kdv_keeps_mode_magnitudes() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavenf(&["simulate", "kdv", "--gamma", "0", "--T", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&dir.path().join("summary.json"));
    assert!(v["max_mode_change"].as_f64().unwrap() < 1e-10);
    for d in v["drift"].as_array().unwrap() {
        assert!(d["max_relative_drift"].as_f64().unwrap() < 1e-10);
    }
    assert!(dir.path().join("modes.csv").exists() && dir.path().join("samples.csv").exists());
}

#[test]
fn blow_up_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavenf(&[
        "simulate", "kdv", "--gamma", "6", "--N", "256", "--dt", "1e-3", "--scheme", "ifrk4", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 4);
    let v = json(&dir.path().join("summary.json"));
    assert_eq!(v["status"], "blow-up");
    assert!(v["first_bad_time"].as_f64().unwrap() > 0.0);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[fpu]\nalpha = \"1/\"\n").unwrap();
    let o = wavenf(&["normal-form", "--model", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = wavenf(&["normal-form", "--model", "/does/not/exist.toml"]);
    assert_eq!(code(&o), 2);
    let o = wavenf(&["compare", "--model", example("waterwaves.toml").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn compare_table_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavenf(&[
        "compare",
        "--model",
        example("fpu.toml").to_str().unwrap(),
        "--mu-grid",
        "1/8,1/16",
        "--jobs",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("summary.json"));
    assert_eq!(v["monotone"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(dir.path().join("compare.csv").exists());
}

#[test]
fn verify_default_and_jacobi() {
    let o = wavenf(&["verify"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = wavenf(&["verify", "--suite", "jacobi", "--draws", "200"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("suite jacobi: PASS"));
    let o = wavenf(&["verify", "--suite", "paper-coefficients"]);
    assert_eq!(code(&o), 0);
}
