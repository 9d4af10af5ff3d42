use std::path::Path;
use std::process::Command;

use serde_json::Value;
use wvdeflect_cli::dataset::sha256_hex;
use wvdeflect_cli::{Scenario, MANIFEST_FILE};
use wvdeflect_core::physparams::DEFAULT_CONFIG;

fn wvdeflect(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_wvdeflect"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("WVDEFLECT_CONFIG")
        .output()
        .expect("spawning wvdeflect")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn every_scenario_is_deterministic_and_fully_manifested() {
    let root = tempfile::tempdir().unwrap();
    for scenario in Scenario::ALL {
        let (a, b) = (
            root.path().join(format!("{}-a", scenario.name())),
            root.path().join(format!("{}-b", scenario.name())),
        );
        for dir in [&a, &b] {
            let out = wvdeflect(&[scenario.name()], dir);
            assert_eq!(
                out.status.code(),
                Some(0),
                "{}: {}",
                scenario.name(),
                String::from_utf8_lossy(&out.stderr)
            );
        }
        assert_eq!(
            files(&a),
            files(&b),
            "{} differs between runs",
            scenario.name()
        );

        let m = manifest(&a);
        assert_eq!(m["status"], "complete");
        let listed = m["files"].as_array().unwrap();
        assert!(!listed.is_empty());
        for f in listed {
            let bytes = std::fs::read(a.join(f["path"].as_str().unwrap())).unwrap();
            assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&bytes));
        }
        // Everything on disk besides the manifest is listed in it.
        assert_eq!(files(&a).len(), listed.len() + 1);
    }
}

#[test]
fn default_coefficients_list_a_zero_dark_gradient() {
    let dir = tempfile::tempdir().unwrap();
    let out = wvdeflect(&["coefficients"], dir.path());
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("coefficients.csv")).unwrap();
    assert!(
        csv.lines()
            .any(|l| l == "b1_minus,0.0000000000000000e0,rad/(s*m)"),
        "{csv}"
    );
}

#[test]
fn validate_reports_small_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let out = wvdeflect(&["validate"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(dir.path());
    let gaps = m["oracle_gaps"].as_object().unwrap();
    assert!(!gaps.is_empty());
    for (name, gap) in gaps {
        assert!(gap.as_f64().unwrap() < 1e-8, "{name}: {gap}");
    }
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = wvdeflect(&["coefficients", "--set", "beam.nonsense=1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = wvdeflect(
        &["coefficients", "--config", "/definitely/not/here.toml"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let out = wvdeflect(&["coefficients", "--set", "beam.a=-1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn regime_failure_exits_3_after_writing_only_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = wvdeflect(&["figure3", "--set", "magnet.b1=1.0"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(manifest(dir.path())["status"], "regime-failed");
    assert_eq!(files(dir.path()).len(), 1);

    let forced = tempfile::tempdir().unwrap();
    let out = wvdeflect(
        &["coefficients", "--set", "magnet.b1=1.0", "--force"],
        forced.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(manifest(forced.path())["forced"], true);
}

#[test]
fn aliased_grid_exits_4() {
    // ε = 10⁴ puts the σ₊ kick beyond the default grid's Nyquist wavenumber.
    let dir = tempfile::tempdir().unwrap();
    let out = wvdeflect(
        &["validate", "--set", "magnet.b1=0.91", "--force"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(manifest(dir.path())["status"], "oracle-failed");

    let sc = tempfile::tempdir().unwrap();
    let out = wvdeflect(
        &[
            "coefficients",
            "--self-check",
            "--set",
            "magnet.b1=0.91",
            "--force",
        ],
        sc.path(),
    );
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_path_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("wide.toml");
    std::fs::write(&config, DEFAULT_CONFIG.replace("a = 0.002", "a = 0.003")).unwrap();
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_wvdeflect"))
        .args(["coefficients", "--out"])
        .arg(&out_dir)
        .env("WVDEFLECT_CONFIG", &config)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let m = manifest(&out_dir);
    assert_eq!(m["parameters"]["beam"]["a"], 0.003);
    assert_eq!(m["config_source"], config.display().to_string());
}
