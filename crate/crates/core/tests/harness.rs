use cpsim::geom::Pose2;
use cpsim::harness::{
    run_scenario, run_scenario_with_report, run_with_inputs, scenario_from_catalog, InputSchedule, RunLog,
    ScenarioConfig, TeleopInput,
};
use cpsim::metrics::{analyze, AnalysisParams};
use cpsim::vehicle::TffMode;
use cpsim::Error;

const CUSTOM: &str = r#"{
    "domain": "rw",
    "perspective": "S",
    "vru": { "kind": "pedestrian", "speed": 1.2 },
    "path": { "shape": { "type": "straight", "length": 20.0 }, "origin": { "x": 12.0, "y": 0.0, "yaw": 0.0 } },
    "duration": 10.0,
    "dt": 0.05,
    "seed": 7
}"#;

fn config_error(json: &str) -> (String, String) {
    match ScenarioConfig::<f64>::from_json_str(json) {
        Err(Error::Config { path, reason }) => (path, reason),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn ten_second_custom_run_has_200_records() {
    let cfg = ScenarioConfig::<f64>::from_json_str(CUSTOM).unwrap();
    assert_eq!(cfg.test_case_id, None);
    let log = run_scenario(&cfg).unwrap();
    assert_eq!(log.frames.len(), 200);
    for (k, f) in log.frames.iter().enumerate() {
        assert_eq!(f.tick, k as u64);
        assert!((f.timestamp - k as f64 * 0.05).abs() < 1e-12);
    }
}

#[test]
fn identical_configs_give_identical_bytes() {
    let cfg = scenario_from_catalog::<f64>(8).unwrap();
    let a = run_scenario(&cfg).unwrap().to_jsonl().unwrap();
    let b = run_scenario(&cfg).unwrap().to_jsonl().unwrap();
    assert_eq!(a, b);
    let mut other = cfg.clone();
    other.seed += 1;
    assert_ne!(a, run_scenario(&other).unwrap().to_jsonl().unwrap());
}

#[test]
fn log_round_trip_is_byte_stable() {
    let log = run_scenario(&scenario_from_catalog::<f64>(5).unwrap()).unwrap();
    let text = log.to_jsonl().unwrap();
    let back = RunLog::<f64>::from_jsonl_str(&text).unwrap();
    assert_eq!(back, log);
    assert_eq!(back.to_jsonl().unwrap(), text);
    assert!(text.lines().next().unwrap().contains("\"schema_version\":1"));
}

#[test]
fn online_report_equals_offline_analysis() {
    let params = AnalysisParams::default();
    for id in [2, 7, 12] {
        let out = run_scenario_with_report(&scenario_from_catalog::<f64>(id).unwrap(), &params).unwrap();
        let reread = RunLog::<f64>::from_jsonl_str(&out.log.to_jsonl().unwrap()).unwrap();
        assert_eq!(analyze(&reread, &params).unwrap(), out.online_report, "id {id}");
    }
}

#[test]
fn log_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("cpsim-harness-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.jsonl");
    let log = run_scenario(&ScenarioConfig::<f64>::from_json_str(CUSTOM).unwrap()).unwrap();
    log.write_file(&path).unwrap();
    assert_eq!(RunLog::<f64>::read_file(&path).unwrap(), log);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unsupported_schema_and_bad_lines_are_rejected() {
    let log = run_scenario(&ScenarioConfig::<f64>::from_json_str(CUSTOM).unwrap()).unwrap();
    let text = log.to_jsonl().unwrap();
    let bumped = text.replacen("\"schema_version\":1", "\"schema_version\":2", 1);
    assert!(matches!(RunLog::<f64>::from_jsonl_str(&bumped), Err(Error::LogFormat(_))));
    let mut lines: Vec<&str> = text.lines().collect();
    lines[3] = "{\"tick\": \"x\"}";
    let err = RunLog::<f64>::from_jsonl_str(&lines.join("\n")).unwrap_err().to_string();
    assert!(err.contains("line 4"), "{err}");
    assert!(RunLog::<f64>::from_jsonl_str("").is_err());
}

#[test]
fn config_errors_name_the_field() {
    // The tagged VRU block is buffered before dispatch, so the path stops at
    // the block and the reason names the field.
    let (path, reason) = config_error(&CUSTOM.replace("\"speed\": 1.2", "\"spede\": 1.2"));
    assert_eq!(path, "vru");
    assert!(reason.contains("spede"), "{reason}");
    let (path, reason) = config_error(&CUSTOM.replace("\"length\": 20.0", "\"length\": \"long\""));
    assert_eq!(path, "path.shape");
    assert!(reason.contains("invalid type"), "{reason}");
    let (path, _) = config_error(&CUSTOM.replace("\"x\": 12.0", "\"x\": null"));
    assert_eq!(path, "path.origin.x");
    let (path, _) = config_error(&CUSTOM.replace("\"seed\": 7", "\"seed\": 7, \"colour\": 1"));
    assert_eq!(path, "colour");
    let (path, reason) = config_error(&CUSTOM.replace("\"dt\": 0.05", "\"dt\": 0.04"));
    assert_eq!(path, "dt");
    assert!(reason.contains("fps"), "{reason}");
    let (path, _) = config_error(&CUSTOM.replace("\"duration\": 10.0", "\"duration\": -1.0"));
    assert_eq!(path, "duration");
    let (path, reason) = config_error(&CUSTOM.replace("\"seed\": 7", "\"seed\": 7, \"test_case_id\": 12"));
    assert_eq!(path, "test_case_id");
    assert!(reason.contains("cyclist"), "{reason}");
    let (path, _) = config_error(&CUSTOM.replace("\"kind\": \"pedestrian\"", "\"kind\": \"horse\""));
    assert_eq!(path, "vru.kind");
}

#[test]
fn catalog_configs_survive_json() {
    for id in 1..=12 {
        let cfg = scenario_from_catalog::<f64>(id).unwrap();
        let back = ScenarioConfig::<f64>::from_json_str(&cfg.to_json_pretty().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}

#[test]
fn input_schedule_holds_motion_and_pulses_gestures() {
    let go = TeleopInput { heading_delta: 0.5, speed_target: 1.0, gesture: true };
    let s = InputSchedule { entries: vec![(3, go), (6, TeleopInput { gesture: false, ..go })] };
    assert_eq!(s.at(0), TeleopInput::default());
    assert_eq!(s.at(3), go);
    assert_eq!(s.at(4), TeleopInput { gesture: false, ..go });
    assert_eq!(s.at(100).speed_target, 1.0);
    let wild = TeleopInput { heading_delta: -9.0, speed_target: 8.0, gesture: false }.clamped();
    assert_eq!((wild.heading_delta, wild.speed_target), (-2.0, 3.0));
}

#[test]
fn teleop_run_turns_and_toggles_following() {
    let mut cfg = ScenarioConfig::<f64>::from_json_str(CUSTOM).unwrap();
    cfg.path.origin = Pose2::new(8.0, 0.0, 0.0);
    let walk = TeleopInput { heading_delta: 0.0, speed_target: 1.2, gesture: false };
    let schedule = InputSchedule {
        entries: vec![
            (0, TeleopInput { gesture: true, ..walk }),
            (1, walk),
            (100, TeleopInput { heading_delta: 0.4, ..walk }),
        ],
    };
    let log = run_with_inputs(&cfg, &schedule, 160).unwrap();
    assert_eq!(log.frames.len(), 160);
    assert_eq!(log.frames.iter().filter(|f| f.tff.toggled).count(), 1);
    assert_eq!(log.frames[50].tff.mode, TffMode::Following);
    // The input of tick k moves the root from its tick k-1 pose.
    assert_eq!(log.frames[99].vru_root.yaw, 0.0);
    assert!((log.frames[100].vru_root.yaw - 0.4 * 0.05).abs() < 1e-12);
    assert!(log.frames[159].vru_root.yaw > 1.0);
    assert!(log.frames.iter().all(|f| f.input.is_some()));
    let again = run_with_inputs(&cfg, &schedule, 160).unwrap();
    assert_eq!(again.to_jsonl().unwrap(), log.to_jsonl().unwrap());
}

#[test]
fn single_precision_pipeline_runs() {
    let params = AnalysisParams::<f32>::default();
    let out = run_scenario_with_report(&scenario_from_catalog::<f32>(1).unwrap(), &params).unwrap();
    let r = &out.online_report;
    assert_eq!(r.no_detects, 0);
    let b20 = r.bin_at(20.5).unwrap().max;
    assert!(b20 > 0.05 && b20 < 0.4, "{b20}");
}
