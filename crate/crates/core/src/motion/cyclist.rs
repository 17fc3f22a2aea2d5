use serde::{Deserialize, Serialize};

use crate::geom::{Pose2, Vec3};
use crate::scalar::{wrap_angle, Scalar};
use crate::skeleton::{FrameTag, JointId, SkeletonFrame, NUM_JOINTS};

use super::path::PathSpec;
use super::pedestrian::{body_to_world, pose_gesture_arm, GestureInterval};

/// Fraction of the handlebar wobble that shows up in the rider heading.
const ROOT_WOBBLE_GAIN: f64 = 0.2;
const CRANK_RADIUS: f64 = 0.17;
const THIGH: f64 = 0.45;
const SHIN: f64 = 0.45;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct CyclistParams<T> {
    pub speed: T,
    /// Crank revolutions per second.
    pub pedal_cadence: T,
    pub wobble_amplitude: T,
    pub wobble_frequency: T,
    pub bike_wheelbase: T,
    #[serde(default = "default_body_height")]
    pub body_height: T,
    /// One-handed signals given while riding.
    #[serde(default)]
    pub arm_gesture_schedule: Vec<GestureInterval<T>>,
}

fn default_body_height<T: Scalar>() -> T {
    T::lit(1.75)
}

impl<T: Scalar> Default for CyclistParams<T> {
    fn default() -> Self {
        Self {
            speed: T::lit(1.67),
            pedal_cadence: T::lit(0.8),
            wobble_amplitude: T::zero(),
            wobble_frequency: T::lit(0.7),
            bike_wheelbase: T::lit(1.05),
            body_height: T::lit(1.75),
            arm_gesture_schedule: Vec::new(),
        }
    }
}

impl<T: Scalar> CyclistParams<T> {
    pub fn validate(&self) -> crate::Result<()> {
        let err = |m: &str| Err(crate::Error::InvalidParameter(m.to_string()));
        if !(self.speed >= T::zero()) {
            return err("cyclist speed must be >= 0");
        }
        if !(self.wobble_amplitude >= T::zero() && self.wobble_amplitude <= T::lit(0.3)) {
            return err("wobble_amplitude must be in [0, 0.3] rad");
        }
        if !(self.pedal_cadence >= T::zero() && self.wobble_frequency >= T::zero()) {
            return err("cadence and wobble frequency must be >= 0");
        }
        if !(self.bike_wheelbase > T::zero()) {
            return err("bike_wheelbase must be > 0");
        }
        if !(self.body_height > T::lit(0.5) && self.body_height < T::lit(2.5)) {
            return err("body_height must be in (0.5, 2.5) m");
        }
        if self.arm_gesture_schedule.iter().any(|g| !(g.t_end > g.t_start)) {
            return err("gesture interval must have t_end > t_start");
        }
        Ok(())
    }

    /// Handlebar steering wobble at time `t`, radians.
    pub fn wobble(&self, t: T) -> T {
        self.wobble_amplitude * (T::lit(2.0) * T::PI() * self.wobble_frequency * t).sin()
    }

    pub fn active_gesture(&self, t: T) -> Option<(crate::skeleton::BodySide, super::GestureKind)> {
        self.arm_gesture_schedule.iter().find(|g| g.contains(t)).map(|g| (g.side, g.kind))
    }
}

/// Two-link sagittal knee placement between hip and ankle, knee forward.
fn knee<T: Scalar>(hip: Vec3<T>, ankle: Vec3<T>) -> Vec3<T> {
    let dx = ankle.x - hip.x;
    let dz = ankle.z - hip.z;
    let d = dx.hypot(dz);
    let half = d / T::lit(2.0);
    let l = T::lit((THIGH + SHIN) / 2.0);
    let h = (l * l - half * half).max(T::zero()).sqrt();
    let (nx, nz) = (-dz / d, dx / d);
    let mid = (hip + ankle) * T::lit(0.5);
    Vec3::new(mid.x + h * nx, mid.y, mid.z + h * nz)
}

/// Seated rider in the body frame (origin on the ground under the saddle).
pub fn articulate_cyclist_body<T: Scalar>(cp: &CyclistParams<T>, t: T) -> [Vec3<T>; NUM_JOINTS] {
    let k = cp.body_height / T::lit(1.75);
    let v = |x: f64, y: f64, z: f64| Vec3::new(T::lit(x), T::lit(y), T::lit(z)) * k;
    let mut j = [Vec3::zero(); NUM_JOINTS];
    j[0] = v(0.0, 0.0, 1.0);
    j[1] = v(0.0, 0.09, 0.95);
    j[2] = v(0.0, -0.09, 0.95);
    j[3] = v(0.05, 0.0, 1.11);
    j[6] = v(0.11, 0.0, 1.22);
    j[9] = v(0.17, 0.0, 1.32);
    j[12] = v(0.28, 0.0, 1.46);
    j[13] = v(0.24, 0.08, 1.41);
    j[14] = v(0.24, -0.08, 1.41);
    j[15] = v(0.37, 0.0, 1.56);
    j[16] = v(0.24, 0.19, 1.40);
    j[17] = v(0.24, -0.19, 1.40);

    // Pedals: counter-rotating about the bottom bracket.
    let crank = T::lit(2.0) * T::PI() * cp.pedal_cadence * t;
    let bb = v(0.10, 0.0, 0.30);
    for (ankle, foot, hip, y, phase) in [
        (JointId::L_ANKLE, JointId::L_FOOT, JointId::L_HIP, 0.12, T::zero()),
        (JointId::R_ANKLE, JointId::R_FOOT, JointId::R_HIP, -0.12, T::PI()),
    ] {
        let (s, c) = (crank + phase).sin_cos();
        let a = Vec3::new(
            bb.x + T::lit(CRANK_RADIUS) * k * c,
            T::lit(y) * k,
            bb.z + T::lit(CRANK_RADIUS) * k * s + T::lit(0.08) * k,
        );
        j[ankle.index()] = a;
        j[foot.index()] = a + v(0.12, 0.0, -0.06);
        let kn = if ankle == JointId::L_ANKLE { JointId::L_KNEE } else { JointId::R_KNEE };
        j[kn.index()] = knee(j[hip.index()] * (T::one() / k), a * (T::one() / k)) * k;
    }

    // Hands on the grips, rotating with the handlebar wobble.
    let bar = v(0.62, 0.0, 1.05);
    let steer = cp.wobble(t);
    for (hand, wrist, elbow, shoulder, y) in [
        (JointId::L_HAND, JointId::L_WRIST, JointId::L_ELBOW, JointId::L_SHOULDER, 0.22),
        (JointId::R_HAND, JointId::R_WRIST, JointId::R_ELBOW, JointId::R_SHOULDER, -0.22),
    ] {
        let grip = bar + v(0.0, y, 0.0).rotate_z(steer);
        j[hand.index()] = grip;
        let w = grip + v(-0.07, 0.0, 0.02);
        j[wrist.index()] = w;
        let s = j[shoulder.index()];
        j[elbow.index()] = (s + w) * T::lit(0.5) + v(-0.03, 0.0, -0.08);
    }
    if let Some((side, kind)) = cp.active_gesture(t) {
        pose_gesture_arm(&mut j, side, kind, k);
    }
    j
}

/// Ground-truth cyclist at time `t`. Heading follows the path tangent plus a
/// fraction of the handlebar wobble.
pub fn cyclist_frame_at<T: Scalar>(
    t: T,
    path: &PathSpec<T>,
    cp: &CyclistParams<T>,
    subject_id: i64,
) -> crate::Result<(SkeletonFrame<T>, Pose2<T>)> {
    let total = path.total_length();
    let s = (cp.speed * t).max(T::zero()).min(total);
    let mut root = path.pose_at(s)?;
    root.yaw = wrap_angle(root.yaw + T::lit(ROOT_WOBBLE_GAIN) * cp.wobble(t));
    let frame =
        SkeletonFrame::new(t, subject_id, FrameTag::World, body_to_world(&root, articulate_cyclist_body(cp, t)));
    Ok((frame, root))
}
