//! End-to-end runs of the `sim` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "warn")
        .env_remove("RUST_BACKTRACE")
        .output()
        .unwrap()
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = sim(args, dir);
    assert!(out.status.success(), "sim {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("{e}: {text}"))
}

#[test]
fn run_writes_a_log_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&["run", "--scenario", "1", "--out", "r1.jsonl", "--report", "r1.json"], dir.path());
    assert!(stdout.contains("frames  800"), "{stdout}");
    let log = std::fs::read_to_string(dir.path().join("r1.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 801);
    assert_eq!(json(log.lines().next().unwrap())["schema_version"], 1);
    let report = json(&std::fs::read_to_string(dir.path().join("r1.json")).unwrap());
    assert_eq!(report["frames"], 800);

    // Offline analysis of the written log matches the online report.
    let offline = json(&ok(&["analyze", "r1.jsonl"], dir.path()));
    assert_eq!(offline, report);
}

#[test]
fn scenario_files_are_accepted_and_bad_ones_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
        "domain": "cp", "perspective": "D",
        "vru": { "kind": "pedestrian", "speed": 1.0 },
        "path": { "shape": { "type": "straight", "length": 5.0 }, "origin": { "x": 10.0, "y": 0.0, "yaw": 0.0 } },
        "duration": 2.0, "dt": 0.05, "seed": 3
    }"#;
    std::fs::write(dir.path().join("ok.json"), cfg).unwrap();
    let stdout = ok(&["run", "--scenario", "ok.json", "--out", "ok.jsonl"], dir.path());
    assert!(stdout.contains("CP D") && stdout.contains("frames   40"), "{stdout}");

    std::fs::write(dir.path().join("bad.json"), cfg.replace("\"speed\"", "\"sped\"")).unwrap();
    let out = sim(&["run", "--scenario", "bad.json", "--out", "bad.jsonl"], dir.path());
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("scenario bad.json") && err.contains("sped"), "{err}");
    assert!(!dir.path().join("bad.jsonl").exists());

    std::fs::write(dir.path().join("noseed.json"), cfg.replace(r#", "seed": 3"#, "")).unwrap();
    let out = sim(&["run", "--scenario", "noseed.json", "--out", "x.jsonl"], dir.path());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(!out.status.success() && err.contains("<root>") && err.contains("seed"), "{err}");

    let out = sim(&["run", "--scenario", "13", "--out", "x.jsonl"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn suite_analyze_and_report_agree_on_a_pair() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&["suite", "--ids", "1,4", "--out-dir", "s"], dir.path());
    assert_eq!(stdout.lines().count(), 2, "{stdout}");
    let s = dir.path().join("s");
    for name in ["run_01.jsonl", "run_04.jsonl", "report_01.json", "report_04.json", "comparison_01_04.txt"] {
        assert!(s.join(name).exists(), "{name}");
    }
    let suite_csv = std::fs::read_to_string(s.join("comparison_01_04.csv")).unwrap();
    assert_eq!(suite_csv.lines().count(), 7);

    // Order of the pair does not matter.
    let pair = json(&ok(&["analyze", "s/run_04.jsonl", "s/run_01.jsonl", "--out-dir", "an"], dir.path()));
    assert_eq!(pair["rw"]["meta"]["domain"], "RW");
    assert_eq!(pair["comparison"]["rows"].as_array().unwrap().len(), 6);
    assert_eq!(std::fs::read_to_string(dir.path().join("an/comparison.csv")).unwrap(), suite_csv);
    assert!(dir.path().join("an/run_01.report.json").exists());

    let text = ok(&["report", "--pair", "s/run_01.jsonl", "s/run_04.jsonl", "--csv", "rep.csv"], dir.path());
    assert!(text.contains("RE denominator rw"), "{text}");
    assert_eq!(std::fs::read_to_string(dir.path().join("rep.csv")).unwrap(), suite_csv);

    let all = ok(
        &["report", "--pair", "s/run_01.jsonl", "s/run_04.jsonl", "--all-joints", "--re-denominator", "cp"],
        dir.path(),
    );
    assert!(all.contains("RE denominator cp"));
    assert_eq!(all.lines().count(), 2 + 23, "{all}");

    let out = sim(&["report", "--pair", "s/run_01.jsonl", "s/run_01.jsonl"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("one RW and one CP"));
}

#[test]
fn calibrate_reports_geometry_and_checks_alignment() {
    let dir = tempfile::tempdir().unwrap();
    let geometry = r#"{"width": 4.0, "d_cam": 2.0, "h_cam": 1.5, "d_horizon": 200.0, "camera_pitch": 0.1326,
        "projector": {"height": 2.5, "distance": 3.0, "pitch": 0.1}, "projector_resolution": [1280, 960]}"#;
    std::fs::write(dir.path().join("g.json"), geometry).unwrap();
    let out = json(&ok(&["calibrate", "g.json", "--check", "100", "101.2"], dir.path()));
    let hfov = out["hfov_deg"].as_f64().unwrap();
    assert!((hfov - 2.0 * 1.0f64.atan().to_degrees()).abs() < 1e-9, "{hfov}");
    assert!((out["alignment_error_pct"].as_f64().unwrap() - 1.2).abs() < 1e-9);
    assert_eq!(out["keystone"].as_array().unwrap().len(), 3);

    let failed = sim(&["calibrate", "g.json", "--check", "100", "103"], dir.path());
    assert!(!failed.status.success());
    assert!(String::from_utf8_lossy(&failed.stderr).contains("exceeds 1.5%"));
}

#[test]
fn serve_runs_a_bounded_unpaced_session() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(&["serve", "--port", "0", "--unpaced", "--ticks", "60", "--out", "live.jsonl"], dir.path());
    assert!(stdout.starts_with("listening on 127.0.0.1:"), "{stdout}");
    assert!(stdout.contains("served 1 session(s), 60 ticks"), "{stdout}");
    let log = std::fs::read_to_string(dir.path().join("live.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 61);
    let report = json(&ok(&["analyze", "live.jsonl"], dir.path()));
    assert_eq!(report["frames"], 60);
}
