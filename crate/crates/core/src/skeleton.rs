//! 24-joint skeletal representation.
//!
//! Joint enumeration follows the SMPL ordering: pelvis is joint 0 and every
//! bone hangs off it in a tree. Coordinates are meters, `x` forward, `y` left,
//! `z` up in the body and world frames.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{Pose2, Vec3};
use crate::scalar::Scalar;

pub const NUM_JOINTS: usize = 24;

/// Minimum and maximum admissible bone length for a valid frame, meters.
pub const BONE_MIN: f64 = 0.01;
pub const BONE_MAX: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct JointId(u8);

impl JointId {
    pub const PELVIS: JointId = JointId(0);
    pub const L_HIP: JointId = JointId(1);
    pub const R_HIP: JointId = JointId(2);
    pub const SPINE1: JointId = JointId(3);
    pub const L_KNEE: JointId = JointId(4);
    pub const R_KNEE: JointId = JointId(5);
    pub const SPINE2: JointId = JointId(6);
    pub const L_ANKLE: JointId = JointId(7);
    pub const R_ANKLE: JointId = JointId(8);
    pub const SPINE3: JointId = JointId(9);
    pub const L_FOOT: JointId = JointId(10);
    pub const R_FOOT: JointId = JointId(11);
    pub const NECK: JointId = JointId(12);
    pub const L_COLLAR: JointId = JointId(13);
    pub const R_COLLAR: JointId = JointId(14);
    pub const HEAD: JointId = JointId(15);
    pub const L_SHOULDER: JointId = JointId(16);
    pub const R_SHOULDER: JointId = JointId(17);
    pub const L_ELBOW: JointId = JointId(18);
    pub const R_ELBOW: JointId = JointId(19);
    pub const L_WRIST: JointId = JointId(20);
    pub const R_WRIST: JointId = JointId(21);
    pub const L_HAND: JointId = JointId(22);
    pub const R_HAND: JointId = JointId(23);

    /// The anchor joint used by all anchor-relative metrics.
    pub const ANCHOR: JointId = Self::PELVIS;
    /// The joints tracked in stability tables: hands, feet (ankles), shoulders.
    pub const TRACKED: [JointId; 6] =
        [Self::L_HAND, Self::R_HAND, Self::L_ANKLE, Self::R_ANKLE, Self::L_SHOULDER, Self::R_SHOULDER];

    pub fn new(index: usize) -> Result<Self> {
        if index < NUM_JOINTS {
            Ok(JointId(index as u8))
        } else {
            Err(Error::InvalidParameter(format!("joint index {index} out of 0..24")))
        }
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub fn all() -> impl Iterator<Item = JointId> {
        (0..NUM_JOINTS as u8).map(JointId)
    }

    pub fn name(self) -> &'static str {
        JOINT_NAMES[self.index()]
    }

    /// Body side of the joint, `None` for joints on the midline.
    pub fn side(self) -> Option<BodySide> {
        match self.0 {
            0 | 3 | 6 | 9 | 12 | 15 => None,
            i if i % 3 == 1 && i < 13 => Some(BodySide::Left),
            i if i % 3 == 2 && i < 13 => Some(BodySide::Right),
            13 | 16 | 18 | 20 | 22 => Some(BodySide::Left),
            _ => Some(BodySide::Right),
        }
    }
}

impl TryFrom<u8> for JointId {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        JointId::new(v as usize)
    }
}

impl From<JointId> for u8 {
    fn from(j: JointId) -> u8 {
        j.0
    }
}

impl fmt::Display for JointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub const JOINT_NAMES: [&str; NUM_JOINTS] = [
    "pelvis",
    "l_hip",
    "r_hip",
    "spine1",
    "l_knee",
    "r_knee",
    "spine2",
    "l_ankle",
    "r_ankle",
    "spine3",
    "l_foot",
    "r_foot",
    "neck",
    "l_collar",
    "r_collar",
    "head",
    "l_shoulder",
    "r_shoulder",
    "l_elbow",
    "r_elbow",
    "l_wrist",
    "r_wrist",
    "l_hand",
    "r_hand",
];

/// SMPL kinematic tree, parent of each joint (`None` for the root).
pub const SMPL_PARENTS: [Option<u8>; NUM_JOINTS] = [
    None,
    Some(0),
    Some(0),
    Some(0),
    Some(1),
    Some(2),
    Some(3),
    Some(4),
    Some(5),
    Some(6),
    Some(7),
    Some(8),
    Some(9),
    Some(9),
    Some(9),
    Some(12),
    Some(13),
    Some(14),
    Some(16),
    Some(17),
    Some(18),
    Some(19),
    Some(20),
    Some(21),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BodySide {
    Left,
    Right,
}

impl BodySide {
    pub fn opposite(self) -> Self {
        match self {
            BodySide::Left => BodySide::Right,
            BodySide::Right => BodySide::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameTag {
    World,
    Vehicle,
    Camera,
}

impl fmt::Display for FrameTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FrameTag::World => "world",
            FrameTag::Vehicle => "vehicle",
            FrameTag::Camera => "camera",
        };
        f.write_str(s)
    }
}

/// One timestamped set of 24 joint positions for one person.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SkeletonFrame<T> {
    pub timestamp: T,
    pub subject_id: i64,
    pub frame_tag: FrameTag,
    pub joints: [Vec3<T>; NUM_JOINTS],
}

impl<T: Scalar> SkeletonFrame<T> {
    pub fn new(timestamp: T, subject_id: i64, frame_tag: FrameTag, joints: [Vec3<T>; NUM_JOINTS]) -> Self {
        Self { timestamp, subject_id, frame_tag, joints }
    }

    pub fn joint(&self, j: JointId) -> Vec3<T> {
        self.joints[j.index()]
    }

    pub fn hip(&self) -> Vec3<T> {
        self.joint(JointId::ANCHOR)
    }

    pub fn is_finite(&self) -> bool {
        self.timestamp.is_finite() && self.joints.iter().all(|p| p.is_finite())
    }

    /// Euclidean distance of joint `j` to the pelvis anchor.
    pub fn joint_distance_to_anchor(&self, j: JointId) -> Result<T> {
        if !self.is_finite() {
            return Err(Error::InvalidFrame("non-finite joint".into()));
        }
        if j == JointId::ANCHOR {
            return Ok(T::zero());
        }
        Ok((self.joint(j) - self.hip()).norm())
    }

    /// Re-expresses a world-frame skeleton in the frame whose origin is `pose`.
    /// Heights are unchanged.
    pub fn transform_frame(&self, pose: &Pose2<T>, target: FrameTag) -> Result<Self> {
        if self.frame_tag != FrameTag::World {
            return Err(Error::WrongFrame { expected: FrameTag::World.to_string(), found: self.frame_tag.to_string() });
        }
        let mut out = self.clone();
        out.frame_tag = target;
        for p in out.joints.iter_mut() {
            *p = pose.to_local(*p);
        }
        Ok(out)
    }

    /// Applies a function to every joint, keeping metadata.
    pub fn map_joints(&self, f: impl Fn(JointId, Vec3<T>) -> Vec3<T>) -> Self {
        let mut out = self.clone();
        for j in JointId::all() {
            out.joints[j.index()] = f(j, self.joints[j.index()]);
        }
        out
    }
}

/// Free-standing form of [`SkeletonFrame::joint_distance_to_anchor`].
pub fn joint_distance_to_anchor<T: Scalar>(frame: &SkeletonFrame<T>, j: JointId) -> Result<T> {
    frame.joint_distance_to_anchor(j)
}

/// Free-standing form of [`SkeletonFrame::transform_frame`].
pub fn transform_frame<T: Scalar>(
    frame: &SkeletonFrame<T>,
    pose: &Pose2<T>,
    target: FrameTag,
) -> Result<SkeletonFrame<T>> {
    frame.transform_frame(pose, target)
}

/// Parent/child edge list of the skeleton, checked to be a tree rooted at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoneGraph {
    edges: Vec<(JointId, JointId)>,
}

impl BoneGraph {
    pub fn new(edges: Vec<(JointId, JointId)>) -> Result<Self> {
        if edges.len() != NUM_JOINTS - 1 {
            return Err(Error::InvalidParameter(format!(
                "bone graph needs {} edges, got {}",
                NUM_JOINTS - 1,
                edges.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); NUM_JOINTS];
        for &(a, b) in &edges {
            if a == b {
                return Err(Error::InvalidParameter(format!("self loop at joint {a}")));
            }
            adjacency[a.index()].push(b.index());
            adjacency[b.index()].push(a.index());
        }
        // n-1 edges plus connectivity implies acyclic.
        let mut seen = [false; NUM_JOINTS];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(n) = stack.pop() {
            for &m in &adjacency[n] {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!("bone graph disconnected at joint {missing}")));
        }
        Ok(Self { edges })
    }

    pub fn smpl() -> Self {
        let edges = SMPL_PARENTS
            .iter()
            .enumerate()
            .filter_map(|(child, p)| p.map(|p| (JointId(p), JointId(child as u8))))
            .collect();
        Self::new(edges).expect("SMPL tree is valid")
    }

    pub fn edges(&self) -> &[(JointId, JointId)] {
        &self.edges
    }
}

impl Default for BoneGraph {
    fn default() -> Self {
        Self::smpl()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoneViolation {
    pub parent: JointId,
    pub child: JointId,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonVerdict {
    pub valid: bool,
    pub non_finite: bool,
    pub violations: Vec<BoneViolation>,
}

pub fn validate_skeleton<T: Scalar>(frame: &SkeletonFrame<T>, graph: &BoneGraph) -> SkeletonVerdict {
    let non_finite = !frame.is_finite();
    let violations: Vec<_> = graph
        .edges()
        .iter()
        .filter_map(|&(a, b)| {
            let len = (frame.joint(b) - frame.joint(a)).norm().as_f64();
            let ok = len.is_finite() && (BONE_MIN..=BONE_MAX).contains(&len);
            (!ok).then_some(BoneViolation { parent: a, child: b, length: len })
        })
        .collect();
    SkeletonVerdict { valid: !non_finite && violations.is_empty(), non_finite, violations }
}

/// Standing rest pose in the body frame (origin on the ground under the
/// pelvis), scaled to `body_height`. Reference proportions are for 1.75 m.
pub fn rest_pose<T: Scalar>(body_height: T) -> [Vec3<T>; NUM_JOINTS] {
    const REST: [[f64; 3]; NUM_JOINTS] = [
        [0.0, 0.0, 0.95],
        [0.0, 0.09, 0.87],
        [0.0, -0.09, 0.87],
        [0.0, 0.0, 1.06],
        [0.0, 0.10, 0.50],
        [0.0, -0.10, 0.50],
        [0.0, 0.0, 1.18],
        [0.0, 0.10, 0.08],
        [0.0, -0.10, 0.08],
        [0.0, 0.0, 1.30],
        [0.13, 0.10, 0.02],
        [0.13, -0.10, 0.02],
        [0.0, 0.0, 1.50],
        [0.0, 0.08, 1.43],
        [0.0, -0.08, 1.43],
        [0.02, 0.0, 1.62],
        [0.0, 0.19, 1.42],
        [0.0, -0.19, 1.42],
        [0.0, 0.21, 1.14],
        [0.0, -0.21, 1.14],
        [0.0, 0.22, 0.88],
        [0.0, -0.22, 0.88],
        [0.0, 0.22, 0.80],
        [0.0, -0.22, 0.80],
    ];
    let k = body_height / T::lit(1.75);
    REST.map(|[x, y, z]| Vec3::new(T::lit(x), T::lit(y), T::lit(z)) * k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_with(joints: [Vec3<f64>; NUM_JOINTS]) -> SkeletonFrame<f64> {
        SkeletonFrame::new(0.0, 1, FrameTag::World, joints)
    }

    #[test]
    fn tracked_ids() {
        assert_eq!(JointId::ANCHOR.index(), 0);
        assert_eq!((JointId::L_ANKLE.index(), JointId::R_ANKLE.index()), (7, 8));
        assert_eq!((JointId::L_SHOULDER.index(), JointId::R_SHOULDER.index()), (16, 17));
        assert_eq!((JointId::L_HAND.index(), JointId::R_HAND.index()), (22, 23));
        assert_eq!(JointId::HEAD.index(), 15);
        assert!(JointId::new(24).is_err());
        assert_eq!(JointId::all().count(), 24);
    }

    #[test]
    fn sides() {
        assert_eq!(JointId::PELVIS.side(), None);
        assert_eq!(JointId::HEAD.side(), None);
        for (l, r) in [(1, 2), (4, 5), (7, 8), (10, 11), (13, 14), (16, 17), (18, 19), (20, 21), (22, 23)] {
            assert_eq!(JointId(l).side(), Some(BodySide::Left), "{l}");
            assert_eq!(JointId(r).side(), Some(BodySide::Right), "{r}");
        }
    }

    #[test]
    fn anchor_distance_examples() {
        let mut joints = rest_pose(1.75);
        let hip = joints[0];
        joints[5] = hip + Vec3::new(0.0, 0.0, 1.0);
        joints[9] = hip + Vec3::new(1.0, 2.0, 2.0);
        let f = frame_with(joints);
        assert_eq!(f.joint_distance_to_anchor(JointId::PELVIS).unwrap(), 0.0);
        assert!((f.joint_distance_to_anchor(JointId::R_KNEE).unwrap() - 1.0).abs() < 1e-12);
        assert!((f.joint_distance_to_anchor(JointId::SPINE3).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn anchor_distance_rejects_nan() {
        let mut joints = rest_pose(1.75);
        joints[3].x = f64::NAN;
        let err = frame_with(joints).joint_distance_to_anchor(JointId::HEAD).unwrap_err();
        assert!(err.to_string().contains("invalid frame"));
    }

    #[test]
    fn transform_examples() {
        let mut joints = [Vec3::zero(); NUM_JOINTS];
        joints[0] = Vec3::new(2.0, 0.0, 0.9);
        joints[1] = Vec3::new(0.0, 1.0, 0.4);
        let f = frame_with(joints);

        let same = f.transform_frame(&Pose2::identity(), FrameTag::Vehicle).unwrap();
        assert_eq!(same.joints, f.joints);
        assert_eq!(same.frame_tag, FrameTag::Vehicle);

        let shifted = f.transform_frame(&Pose2::new(1.0, 0.0, 0.0), FrameTag::Vehicle).unwrap();
        assert!((shifted.joints[0] - Vec3::new(1.0, 0.0, 0.9)).norm() < 1e-12);

        let turned = f.transform_frame(&Pose2::new(0.0, 0.0, std::f64::consts::FRAC_PI_2), FrameTag::Vehicle).unwrap();
        assert!((turned.joints[1] - Vec3::new(1.0, 0.0, 0.4)).norm() < 1e-12);

        let err = same.transform_frame(&Pose2::identity(), FrameTag::Vehicle).unwrap_err();
        assert!(matches!(err, Error::WrongFrame { .. }));
    }

    #[test]
    fn smpl_graph_is_tree() {
        let g = BoneGraph::smpl();
        assert_eq!(g.edges().len(), 23);
        let mut edges = g.edges().to_vec();
        edges[22] = (JointId(22), JointId(23));
        edges[21] = (JointId(23), JointId(22));
        assert!(BoneGraph::new(edges).is_err());
        assert!(BoneGraph::new(g.edges()[..22].to_vec()).is_err());
    }

    #[test]
    fn validation_examples() {
        let g = BoneGraph::smpl();
        let rest = frame_with(rest_pose(1.75));
        assert!(validate_skeleton(&rest, &g).valid);

        let mut exploded = rest.clone();
        exploded.joints[18] = exploded.joints[16] + Vec3::new(10.0, 0.0, 0.0);
        let v = validate_skeleton(&exploded, &g);
        assert!(!v.valid);
        assert!(v.violations.iter().any(|b| b.parent == JointId(16) && b.child == JointId(18)));

        let collapsed = frame_with([Vec3::new(1.0, 1.0, 1.0); NUM_JOINTS]);
        let v = validate_skeleton(&collapsed, &g);
        assert!(!v.valid);
        assert_eq!(v.violations.len(), 23);
    }

    #[test]
    fn frame_json_round_trip() {
        let f = frame_with(rest_pose(1.8));
        let s = serde_json::to_string(&f).unwrap();
        let back: SkeletonFrame<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn works_in_f32() {
        let f = SkeletonFrame::new(0.0f32, 0, FrameTag::World, rest_pose(1.75f32));
        let d = f.joint_distance_to_anchor(JointId::HEAD).unwrap();
        assert!((d - 0.67 * 1.0).abs() < 1e-2);
    }
}
