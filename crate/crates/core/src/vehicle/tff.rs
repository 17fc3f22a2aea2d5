//! Track-and-follow: target selection, arm-raise gesture toggle, PID
//! longitudinal control and proportional lateral control.

use serde::{Deserialize, Serialize};

use crate::perception::{CameraModel, Detection};
use crate::scalar::Scalar;
use crate::skeleton::{JointId, SkeletonFrame};

use super::pid::{pid_step, PidState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TffMode {
    Idle,
    Following,
    Stopped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct TffParams<T> {
    pub follow_distance_setpoint: T,
    pub kp: T,
    pub ki: T,
    pub kd: T,
    pub k_lat: T,
    pub v_max: T,
    pub steer_max: T,
    /// Hand must clear the head by this much to count as a gesture.
    pub gesture_margin: T,
    /// Gesture-free time required before another toggle is accepted.
    pub gesture_rearm: T,
    /// How long the last command is held after the target disappears.
    pub target_hold: T,
}

impl<T: Scalar> Default for TffParams<T> {
    fn default() -> Self {
        Self {
            follow_distance_setpoint: T::lit(5.0),
            kp: T::lit(0.8),
            ki: T::lit(0.1),
            kd: T::lit(0.05),
            k_lat: T::lit(1.5),
            v_max: T::lit(5.0),
            steer_max: T::lit(0.5),
            gesture_margin: T::lit(0.05),
            gesture_rearm: T::one(),
            target_hold: T::lit(0.5),
        }
    }
}

impl<T: Scalar> TffParams<T> {
    pub fn validate(&self) -> crate::Result<()> {
        let nonneg = [self.kp, self.ki, self.kd, self.k_lat, self.gesture_margin, self.gesture_rearm, self.target_hold];
        if nonneg.iter().any(|g| !(*g >= T::zero())) {
            return Err(crate::Error::InvalidParameter("controller gains and timings must be >= 0".into()));
        }
        if !(self.follow_distance_setpoint > T::zero() && self.v_max > T::zero() && self.steer_max > T::zero()) {
            return Err(crate::Error::InvalidParameter("setpoint, v_max and steer_max must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TffCommand<T> {
    pub v_cmd: T,
    pub steer: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TffState<T> {
    pub mode: TffMode,
    /// Present exactly while following.
    pub target_subject: Option<i64>,
    pub params: TffParams<T>,
    pub pid: PidState<T>,
    gesture_armed: bool,
    quiet_time: T,
    lost_time: T,
    last_command: TffCommand<T>,
}

impl<T: Scalar> TffState<T> {
    pub fn new(params: TffParams<T>) -> Self {
        Self {
            mode: TffMode::Idle,
            target_subject: None,
            pid: PidState::new(params.kp, params.ki, params.kd, T::zero(), params.v_max),
            params,
            gesture_armed: true,
            quiet_time: T::zero(),
            lost_time: T::zero(),
            last_command: TffCommand::default(),
        }
    }

    pub fn follow_distance_setpoint(&self) -> T {
        self.params.follow_distance_setpoint
    }
}

/// Target geometry as used by the controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TargetMeasurement<T> {
    /// Planar hip distance from the camera.
    pub distance: T,
    /// Bearing of the hip off the camera centerline, positive to the right
    /// (image-column convention).
    pub offset_angle: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TffOutput<T> {
    pub command: TffCommand<T>,
    pub state: TffState<T>,
    pub gesture: bool,
    pub toggled: bool,
    pub measurement: Option<TargetMeasurement<T>>,
}

pub fn measure_target<T: Scalar>(target: &Detection<T>, camera: &CameraModel<T>) -> TargetMeasurement<T> {
    let hip = target.hip();
    let dx = hip.x - camera.mount.x;
    let dy = hip.y - camera.mount.y;
    TargetMeasurement { distance: dx.hypot(dy), offset_angle: -(dy.atan2(dx) - camera.mount.yaw) }
}

/// Closest detection whose hip is ahead of the vehicle inside the horizontal
/// field of view. Detections are in the vehicle frame.
pub fn select_target<T: Scalar>(detections: &[Detection<T>], camera: &CameraModel<T>) -> Option<i64> {
    select_target_detection(detections, camera).map(|d| d.subject_id)
}

pub fn select_target_detection<'a, T: Scalar>(
    detections: &'a [Detection<T>],
    camera: &CameraModel<T>,
) -> Option<&'a Detection<T>> {
    detections.iter().filter(|d| d.hip().x > T::zero() && camera.in_horizontal_fov(d.hip())).min_by(|a, b| {
        a.hip()
            .planar_norm()
            .partial_cmp(&b.hip().planar_norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.subject_id.cmp(&b.subject_id))
    })
}

/// Either hand strictly higher than the head plus `margin`.
pub fn detect_gesture<T: Scalar>(frame: &SkeletonFrame<T>, margin: T) -> bool {
    let head = frame.joint(JointId::HEAD).z;
    [JointId::L_HAND, JointId::R_HAND].iter().any(|&h| frame.joint(h).z > head + margin)
}

/// One planning step of the track-and-follow function.
pub fn tff_plan<T: Scalar>(
    tff: &TffState<T>,
    target: Option<&Detection<T>>,
    camera: &CameraModel<T>,
    dt: T,
) -> TffOutput<T> {
    let mut st = *tff;
    let params = st.params;
    let gesture = target.is_some_and(|t| detect_gesture(&t.skeleton, params.gesture_margin));

    let mut toggled = false;
    if gesture {
        if st.gesture_armed {
            st.mode = match st.mode {
                TffMode::Idle | TffMode::Stopped => {
                    st.pid = st.pid.reset();
                    TffMode::Following
                }
                TffMode::Following => TffMode::Stopped,
            };
            st.gesture_armed = false;
            toggled = true;
        }
        st.quiet_time = T::zero();
    } else {
        st.quiet_time = st.quiet_time + dt;
        if st.quiet_time >= params.gesture_rearm {
            st.gesture_armed = true;
        }
    }

    let measurement = target.map(|t| measure_target(t, camera));
    let command = match st.mode {
        TffMode::Idle | TffMode::Stopped => {
            st.target_subject = None;
            st.lost_time = T::zero();
            TffCommand::default()
        }
        TffMode::Following => match (target, measurement) {
            (Some(t), Some(m)) => {
                st.target_subject = Some(t.subject_id);
                st.lost_time = T::zero();
                let (v_cmd, pid) = pid_step(&st.pid, m.distance - params.follow_distance_setpoint, dt);
                st.pid = pid;
                let steer = (-params.k_lat * m.offset_angle).max(-params.steer_max).min(params.steer_max);
                TffCommand { v_cmd, steer }
            }
            _ => {
                st.lost_time = st.lost_time + dt;
                if st.lost_time > params.target_hold {
                    TffCommand::default()
                } else {
                    st.last_command
                }
            }
        },
    };
    st.last_command = command;
    TffOutput { command, state: st, gesture, toggled, measurement }
}
