use serde::{Deserialize, Serialize};

use crate::geom::{Pose2, Vec3};
use crate::scalar::Scalar;
use crate::skeleton::{rest_pose, BodySide, FrameTag, JointId, SkeletonFrame, NUM_JOINTS};

use super::path::PathSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GestureKind {
    /// Arm raised above head level: the track-and-follow toggle.
    RaiseAboveHead,
    /// Forearm bent in front of the chest, e.g. glancing at a wristwatch.
    WatchCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct GestureInterval<T> {
    pub t_start: T,
    pub t_end: T,
    pub side: BodySide,
    #[serde(default = "default_kind")]
    pub kind: GestureKind,
}

fn default_kind() -> GestureKind {
    GestureKind::RaiseAboveHead
}

impl<T: Scalar> GestureInterval<T> {
    pub fn contains(&self, t: T) -> bool {
        t >= self.t_start && t < self.t_end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct GaitParams<T> {
    pub speed: T,
    /// Steps per second.
    pub cadence: T,
    pub arm_swing_amplitude: T,
    pub step_length: T,
    pub body_height: T,
    #[serde(default)]
    pub arm_gesture_schedule: Vec<GestureInterval<T>>,
}

impl<T: Scalar> Default for GaitParams<T> {
    fn default() -> Self {
        Self {
            speed: T::lit(1.4),
            cadence: T::lit(1.8),
            arm_swing_amplitude: T::lit(0.35),
            step_length: T::lit(0.75),
            body_height: T::lit(1.75),
            arm_gesture_schedule: Vec::new(),
        }
    }
}

impl<T: Scalar> GaitParams<T> {
    pub fn validate(&self) -> crate::Result<()> {
        let err = |m: &str| Err(crate::Error::InvalidParameter(m.to_string()));
        if !(self.speed >= T::zero()) {
            return err("gait speed must be >= 0");
        }
        if self.speed > T::zero() && !(self.cadence > T::zero()) {
            return err("gait cadence must be > 0 when walking");
        }
        if !(self.body_height > T::lit(0.5) && self.body_height < T::lit(2.5)) {
            return err("body_height must be in (0.5, 2.5) m");
        }
        if !(self.step_length >= T::zero()) || self.step_length > self.body_height {
            return err("step_length must be in [0, body_height]");
        }
        if self.arm_gesture_schedule.iter().any(|g| !(g.t_end > g.t_start)) {
            return err("gesture interval must have t_end > t_start");
        }
        Ok(())
    }

    pub fn active_gesture(&self, t: T) -> Option<(BodySide, GestureKind)> {
        self.arm_gesture_schedule.iter().find(|g| g.contains(t)).map(|g| (g.side, g.kind))
    }
}

/// Rotation in the sagittal (x-z) plane; positive angles swing a hanging
/// limb forward.
fn swing<T: Scalar>(v: Vec3<T>, angle: T) -> Vec3<T> {
    let (s, c) = angle.sin_cos();
    Vec3::new(v.x * c - v.z * s, v.y, v.x * s + v.z * c)
}

fn side_sign<T: Scalar>(side: BodySide) -> T {
    match side {
        BodySide::Left => T::one(),
        BodySide::Right => -T::one(),
    }
}

const LEFT_LEG: [JointId; 3] = [JointId::L_KNEE, JointId::L_ANKLE, JointId::L_FOOT];
const RIGHT_LEG: [JointId; 3] = [JointId::R_KNEE, JointId::R_ANKLE, JointId::R_FOOT];
const LEFT_ARM: [JointId; 3] = [JointId::L_ELBOW, JointId::L_WRIST, JointId::L_HAND];
const RIGHT_ARM: [JointId; 3] = [JointId::R_ELBOW, JointId::R_WRIST, JointId::R_HAND];

fn limb(side: BodySide, leg: bool) -> (JointId, [JointId; 3]) {
    match (side, leg) {
        (BodySide::Left, true) => (JointId::L_HIP, LEFT_LEG),
        (BodySide::Right, true) => (JointId::R_HIP, RIGHT_LEG),
        (BodySide::Left, false) => (JointId::L_SHOULDER, LEFT_ARM),
        (BodySide::Right, false) => (JointId::R_SHOULDER, RIGHT_ARM),
    }
}

fn swing_limb<T: Scalar>(joints: &mut [Vec3<T>; NUM_JOINTS], side: BodySide, leg: bool, angle: T) {
    let (pivot, chain) = limb(side, leg);
    let p = joints[pivot.index()];
    for j in chain {
        joints[j.index()] = p + swing(joints[j.index()] - p, angle);
    }
}

pub(crate) fn pose_gesture_arm<T: Scalar>(
    joints: &mut [Vec3<T>; NUM_JOINTS],
    side: BodySide,
    kind: GestureKind,
    scale: T,
) {
    let sg = side_sign::<T>(side);
    let (_, [elbow, wrist, hand]) = limb(side, false);
    let shoulder = joints[limb(side, false).0.index()];
    let v = |x: f64, y: f64, z: f64| Vec3::new(T::lit(x) * scale, T::lit(y) * scale * sg, T::lit(z) * scale);
    let (e, w, h) = match kind {
        GestureKind::RaiseAboveHead => (v(0.0, 0.05, 0.28), v(0.02, 0.07, 0.53), v(0.02, 0.07, 0.61)),
        GestureKind::WatchCheck => (v(0.04, 0.03, -0.26), v(0.25, -0.10, -0.20), v(0.30, -0.13, -0.19)),
    };
    joints[elbow.index()] = shoulder + e;
    joints[wrist.index()] = shoulder + w;
    joints[hand.index()] = shoulder + h;
}

/// Body-frame articulated pedestrian. `phase_time` drives the gait cycle;
/// `walking == false` yields the standing pose.
pub fn articulate_pedestrian_body<T: Scalar>(
    gait: &GaitParams<T>,
    phase_time: T,
    walking: bool,
    gesture: Option<(BodySide, GestureKind)>,
) -> [Vec3<T>; NUM_JOINTS] {
    let scale = gait.body_height / T::lit(1.75);
    let mut joints = rest_pose(gait.body_height);
    if walking {
        let omega = T::PI() * gait.cadence;
        let phase = omega * phase_time;
        let leg_len = (joints[JointId::L_HIP.index()] - joints[JointId::L_ANKLE.index()]).norm();
        let leg_amp = (gait.step_length / (T::lit(2.0) * leg_len)).min(T::one()).asin();
        let leg = leg_amp * phase.sin();
        swing_limb(&mut joints, BodySide::Left, true, leg);
        swing_limb(&mut joints, BodySide::Right, true, -leg);
        let arm = gait.arm_swing_amplitude * phase.sin();
        swing_limb(&mut joints, BodySide::Left, false, -arm);
        swing_limb(&mut joints, BodySide::Right, false, arm);
        // Whole-body bob and sway; anchor-relative geometry is unaffected.
        let bob = T::lit(0.02) * scale * (T::one() - (phase + phase).cos()) / T::lit(2.0);
        let sway = T::lit(0.02) * scale * phase.sin();
        for p in joints.iter_mut() {
            p.y = p.y + sway;
            p.z = p.z + bob;
        }
    }
    if let Some((side, kind)) = gesture {
        pose_gesture_arm(&mut joints, side, kind, scale);
    }
    joints
}

pub fn body_to_world<T: Scalar>(root: &Pose2<T>, body: [Vec3<T>; NUM_JOINTS]) -> [Vec3<T>; NUM_JOINTS] {
    body.map(|p| root.to_parent(p))
}

/// Ground-truth pedestrian at time `t`: the root follows the path at
/// `gait.speed`; once the path end is reached the pedestrian stands there.
pub fn pedestrian_frame_at<T: Scalar>(
    t: T,
    path: &PathSpec<T>,
    gait: &GaitParams<T>,
    subject_id: i64,
) -> crate::Result<(SkeletonFrame<T>, Pose2<T>)> {
    let total = path.total_length();
    let s = (gait.speed * t).max(T::zero());
    let walking = gait.speed > T::zero() && s < total;
    let root = path.pose_at(s.min(total))?;
    let body = articulate_pedestrian_body(gait, t, walking, gait.active_gesture(t));
    let frame = SkeletonFrame::new(t, subject_id, FrameTag::World, body_to_world(&root, body));
    Ok((frame, root))
}
