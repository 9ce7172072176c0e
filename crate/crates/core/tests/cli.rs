use std::fs;
use std::process::{Command, Output};

use polarpunct::sim::{parse_csv, SimConfig, CSV_HEADER};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarpunct"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn construct_prints_the_toy_order() {
    let v = stdout_json(&run(&[
        "construct",
        "--n",
        "3",
        "--k",
        "4",
        "--construction",
        "bec:0.5",
    ]));
    assert_eq!(v["I"], serde_json::json!([3, 5, 6, 7]));
    assert_eq!(v["metric"][7], 0.00390625);
}

#[test]
fn propagate_prints_levels_and_pairs() {
    let v = stdout_json(&run(&["propagate", "--n", "3", "--set", "2,3,4,7"]));
    assert_eq!(v["levels"][3], serde_json::json!([2, 1, 0, 4]));
}

#[test]
fn encode_writes_a_golden_vector() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.json");
    let out = run(&["encode", "--u", "0,0,0,1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["x"], serde_json::json!([1, 1, 1, 1]));
}

#[test]
fn config_file_drives_simulate_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.toml");
    fs::write(
        &cfg_path,
        "n = 6\nk = 24\nconstruction = \"ga\"\npuncture = \"wqp\"\nq = 10\nsweep = [1.0, 3.0]\n\
         seed = 3\n\n[stop]\nmax_frames = 300\nmin_frame_errors = 10\n",
    )
    .unwrap();
    assert!(SimConfig::load(&cfg_path).is_ok());

    let csv_path = dir.path().join("curve.csv");
    let out = run(&[
        "simulate",
        "--config",
        cfg_path.to_str().unwrap(),
        "--sweep",
        "2",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].1 <= 300);
}

#[test]
fn bad_config_exits_with_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    fs::write(&cfg_path, "n = 4\nk = 20\nsweep = [1.0]\n").unwrap();
    let out = run(&["simulate", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
