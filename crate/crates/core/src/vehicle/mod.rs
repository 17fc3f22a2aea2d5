//! Kinematic vehicle model and the track-and-follow controller.

mod kinematics;
mod pid;
mod tff;

pub use kinematics::{step_vehicle, VehicleLimits, VehicleState};
pub use pid::{pid_step, PidState};
pub use tff::{
    detect_gesture, measure_target, select_target, select_target_detection, tff_plan, TargetMeasurement, TffCommand,
    TffMode, TffOutput, TffParams, TffState,
};
