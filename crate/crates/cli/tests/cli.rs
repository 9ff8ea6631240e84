//! The binary end to end: output files, exit codes and the cache.

use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_btz-tripartite"));
    c.env("RUST_LOG", "error");
    c
}

#[test]
fn point_run_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pi.csv");
    let status = bin()
        .args(["pitangle", "--no-cache", "--set", "mass=0.01", "--set", "d_horizon=2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let pi_col = headers.iter().position(|h| h == "pi").unwrap();
    let row = rdr.records().next().unwrap().unwrap();
    assert!(row[pi_col].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["correlators", "--no-cache", "--set", "mass=-1"]), Some(2));
    assert_eq!(code(&["negativity", "--no-cache", "--set", "spacing=1"]), Some(2));
    assert_eq!(code(&["sweep", "--no-cache"]), Some(2));
    assert_eq!(code(&["correlators", "--config", "/nonexistent/run.toml"]), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "omega = 1.0\n[numerics.correlators.images]\nn_cap = 1\n").unwrap();
    let out = bin()
        .args(["correlators", "--no-cache", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("converge_fail"));
}

#[test]
fn cached_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let out = bin()
            .env("BTZ_TRIPARTITE_CACHE_DIR", dir.path())
            .args(["sweep", "--workers", "2", "--vary", "d_horizon:0.5:2:3"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let cold = run();
    assert_eq!(cold, run());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 3);
}
