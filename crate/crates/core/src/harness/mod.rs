//! Scenario catalog, closed-loop runner, run logs and batch execution.

mod calibrate;
mod catalog;
mod config;
mod log;
mod runner;
mod suite;

pub use calibrate::{calibrate_depth_noise, straight_run_variability, NoiseCalibration};
pub use catalog::{
    catalog_id, catalog_seed, catalog_triple, depth_sigma_b, scenario_from_catalog, twin_id, CATALOG_IDS,
    DEPTH_SIGMA_B_CYCLIST_CP, DEPTH_SIGMA_B_CYCLIST_RW, DEPTH_SIGMA_B_PEDESTRIAN,
};
pub use config::{ScenarioConfig, VehicleConfig, VruParams};
pub use log::{FrameRecord, LogHeader, LogWriter, RunLog, RunMeta, TffRecord, SCHEMA_VERSION};
pub use runner::{
    run_scenario, run_scenario_with_report, run_with_inputs, InputSchedule, LiveMetrics, RunOutput, Simulation,
    TeleopInput, MAX_HEADING_RATE, MAX_TELEOP_SPEED, VRU_SUBJECT_ID,
};
pub use suite::{parse_id_list, run_suite, PairResult, SuiteOutput};
