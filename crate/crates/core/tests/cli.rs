use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const S_CSV: &str =
    "g,v,y,w\n1,1.0,1,1.0\n1,2.0,1,1.0\n1,3.0,0,1.0\n0,5.0,1,1.0\n0,6.0,0,1.0\n0,7.0,0,1.0\n";

fn fairlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_s(dir: &Path) -> String {
    let path = dir.join("S.csv");
    std::fs::write(&path, S_CSV).unwrap();
    path.to_string_lossy().into_owned()
}

fn number(v: &Value, key: &str) -> f64 {
    v[key]
        .as_f64()
        .unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn metrics_on_s() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_s(dir.path());
    let out = fairlab(&["metrics", "--in", &s]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((number(&v, "group_skew") - 6.0).abs() < 1e-12);
    assert!((number(&v, "spd") + 1.0 / 3.0).abs() < 1e-12);
    assert!((number(&v, "di") - 0.5).abs() < 1e-12);
    assert!((number(&v, "phi") - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn dir_lambda_zero_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_s(dir.path());
    let t = dir.path().join("T.csv");
    let out = fairlab(&[
        "repair",
        "--in",
        &s,
        "--config",
        r#"{"method":"dir","lambda":0.0}"#,
        "--out",
        t.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(std::fs::read_to_string(&t).unwrap(), S_CSV);
}

#[test]
fn repair_config_from_file_with_resampling() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_s(dir.path());
    let cfg = dir.path().join("fb.json");
    std::fs::write(&cfg, r#"{"method":"fairbalance"}"#).unwrap();
    let out_path = dir.path().join("R.csv");
    let run = |seed: &str| {
        let out = fairlab(&[
            "repair",
            "--in",
            &s,
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
            "--resample-seed",
            seed,
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        std::fs::read_to_string(&out_path).unwrap()
    };
    let first = run("5");
    assert_eq!(first.lines().count(), 7);
    assert!(first.lines().skip(1).all(|l| l.ends_with(",1.0")));
    assert_eq!(first, run("5"));
}

#[test]
fn gen_then_hist() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"name":"small","seed":3,"groups":[
            {"group_id":0,"size":50,"mean":0.0,"std":1.0,"p_favorable":0.5},
            {"group_id":1,"size":30,"mean":1.0,"std":0.5,"p_favorable":0.2}]}"#,
    )
    .unwrap();
    let csv = dir.path().join("small.csv");
    let out = fairlab(&[
        "gen",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("g,v,y,w\n"));
    assert_eq!(text.lines().count(), 81);

    let out = fairlab(&[
        "hist",
        "--in",
        csv.to_str().unwrap(),
        "--bins",
        "4",
        "--range",
        "-5,5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let hists: Value = serde_json::from_slice(&out.stdout).unwrap();
    let totals: Vec<u64> = hists
        .as_array()
        .unwrap()
        .iter()
        .map(|h| {
            h["counts"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| c.as_u64().unwrap())
                .sum()
        })
        .collect();
    assert_eq!(totals, vec![50, 30]);
}

#[test]
fn gen_with_missing_spec_fails() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    let out = fairlab(&[
        "gen",
        "--spec",
        missing.to_str().unwrap(),
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing.json"), "{stderr}");
}

#[test]
fn unknown_subcommand_and_flag_fail() {
    let out = fairlab(&["frobnicate"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
    let out = fairlab(&["metrics", "--bogus", "x"]);
    assert!(!out.status.success());
}

#[test]
fn invalid_repair_config_fails() {
    let dir = tempfile::tempdir().unwrap();
    let s = write_s(dir.path());
    let out = fairlab(&[
        "repair",
        "--in",
        &s,
        "--config",
        r#"{"method":"dir","lambda":2.0}"#,
        "--out",
        dir.path().join("T.csv").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn sweep_with_empty_repairs_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(&cfg, r#"{"repairs":[],"master_seed":1}"#).unwrap();
    let out = fairlab(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("repairs"));
}

#[test]
fn small_sweep_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{"master_seed":9,"repairs":[{"method":"dir","lambda":1.0},{"method":"reweigh"}],
            "datasets":[{"name":"tiny","seed":4,"groups":[
              {"group_id":0,"size":300,"mean":6.0,"std":0.4,"p_favorable":0.3},
              {"group_id":1,"size":300,"mean":5.5,"std":0.6,"p_favorable":0.7}]}],
            "fit":{"steps":500}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = fairlab(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("sweep.json")).unwrap())
            .unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(out_dir.join("sweep.csv").exists());
    assert!(out_dir.join("hist").join("tiny").is_dir());
}
