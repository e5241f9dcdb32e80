use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_isorearr"));
    c.env_remove("ISOREARR_OUT");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn artifact_names(m: &Value) -> Vec<String> {
    m["artifacts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn gaussian_flow_has_constant_alpha() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["santalo-flow", "--profile", "gaussian", "--n", "1"],
        tmp.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(tmp.path().join("flow.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,mass,alpha,residual,verdict"));
    let alphas: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(alphas.len() >= 2);
    let want = (std::f64::consts::PI / 2.0).sqrt();
    assert!(alphas.iter().all(|a| (a - want).abs() < 1e-6), "{alphas:?}");
    assert!(fs::read_to_string(tmp.path().join("alpha.svg"))
        .unwrap()
        .contains("<svg"));
}

#[test]
fn hopf_lax_comparison_passes_every_level() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "hj-compare",
            "--seed",
            "3",
            "--t",
            "0.5",
            "--lambda-grid",
            "64",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("t0.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 64);
    assert!(rows.iter().all(|r| r.ends_with(",pass")));
}

#[test]
fn fast_verify_all_lists_every_criterion() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["verify-all", "--seed", "7", "--fast"], tmp.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let m = manifest(tmp.path());
    let verdicts = m["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 9);
    assert!(verdicts.iter().all(|v| v["pass"] == Value::Bool(true)));
    assert_eq!(m["status"], "pass");
    assert!(m["timings"]["criterion_7_seconds"].as_f64().is_some());
}

#[test]
fn artifacts_are_reproducible_and_listed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = run(
            &[
                "infconv",
                "--seed",
                "11",
                "--cost",
                "quadratic",
                "--t",
                "0.3",
                "--no-timestamp",
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let names = artifact_names(&manifest(a.path()));
    let mut on_disk: Vec<String> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    let mut listed = names.clone();
    listed.sort();
    assert_eq!(on_disk, listed);
    for n in &names {
        assert_eq!(
            fs::read(a.path().join(n)).unwrap(),
            fs::read(b.path().join(n)).unwrap(),
            "{n} differs"
        );
    }
}

#[test]
fn svg_timestamp_is_the_only_difference() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run(
        &["polar", "--profile", "linear", "--no-timestamp"],
        a.path(),
    );
    run(&["polar", "--profile", "linear"], b.path());
    let plain = fs::read_to_string(a.path().join("polar.svg")).unwrap();
    let stamped = fs::read_to_string(b.path().join("polar.svg")).unwrap();
    let stripped: String = stamped
        .lines()
        .filter(|l| !l.starts_with("<!--"))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(plain, stripped);
    assert_ne!(plain, stamped);
}

#[test]
fn config_file_mirrors_flags_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(&cfg, "# hj settings\nseed = 3\nt = 0.5\nlambda-grid = 16\n").unwrap();
    let from_file = tmp.path().join("file");
    let from_flags = tmp.path().join("flags");
    let overridden = tmp.path().join("override");
    assert!(bin()
        .args(["hj-compare", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&from_file)
        .output()
        .unwrap()
        .status
        .success());
    assert!(run(
        &[
            "hj-compare",
            "--seed",
            "3",
            "--t",
            "0.5",
            "--lambda-grid",
            "16"
        ],
        &from_flags
    )
    .status
    .success());
    assert_eq!(
        fs::read(from_file.join("t0.csv")).unwrap(),
        fs::read(from_flags.join("t0.csv")).unwrap()
    );
    let out = bin()
        .args(["hj-compare", "--lambda-grid", "8", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&overridden)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(overridden.join("t0.csv"))
            .unwrap()
            .lines()
            .count(),
        9
    );
    assert_eq!(manifest(&overridden)["config"]["lambda-grid"], "8");
}

#[test]
fn bad_config_is_reported_in_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.cfg");
    fs::write(&cfg, "nodes = many\n").unwrap();
    let out = bin()
        .args(["infconv", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let m = manifest(tmp.path());
    assert_eq!(m["status"], "error");
    assert!(m["error"].as_str().unwrap().contains("`nodes`"));

    fs::write(&cfg, "lambda = 3\n").unwrap();
    let out = bin()
        .args(["infconv", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(manifest(tmp.path())["error"]
        .as_str()
        .unwrap()
        .contains("`lambda`"));
}

#[test]
fn unknown_command_or_flag_prints_usage() {
    for args in [&["frobnicate"][..], &["infconv", "--frobnicate"][..]] {
        let out = bin().args(args).output().unwrap();
        assert_ne!(out.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    }
}

#[test]
fn environment_overrides_the_default_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("env-out");
    let out = bin()
        .args(["legendre", "--profile", "gaussian"])
        .env("ISOREARR_OUT", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(artifact_names(&manifest(&dir)).contains(&"legendre.csv".to_string()));
}

#[test]
fn unsupported_measure_and_cost_pair_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["infconv", "--measure", "gaussian", "--cost", "quadratic"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(manifest(tmp.path())["status"], "error");
}
