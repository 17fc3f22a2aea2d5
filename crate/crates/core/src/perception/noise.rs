use serde::{Deserialize, Serialize};

use crate::domain::VruKind;
use crate::geom::{Pose2, Vec3};
use crate::scalar::{wrap_angle, Scalar};
use crate::skeleton::{BodySide, JointId};

/// How the VRU is oriented relative to the camera line of sight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewSector {
    Front,
    Diagonal,
    Side,
}

/// Bound of the front sector, degrees of folded relative bearing.
pub const FRONT_MAX_DEG: f64 = 30.0;
/// Bound of the diagonal sector; beyond it is side view.
pub const DIAGONAL_MAX_DEG: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ViewGeometry<T> {
    pub sector: ViewSector,
    /// Body side turned away from the camera; `None` when facing it squarely.
    pub far_side: Option<BodySide>,
    /// Angle between the VRU heading and the direction to the camera, folded
    /// so that facing towards and away from the camera both read as 0.
    pub folded_bearing: T,
}

/// Classifies the view of a VRU with root pose `root` from a camera at
/// world position `camera`.
pub fn view_geometry<T: Scalar>(root: &Pose2<T>, camera: Vec3<T>) -> ViewGeometry<T> {
    let to_cam = (camera.y - root.y).atan2(camera.x - root.x);
    let rel = wrap_angle(to_cam - root.yaw);
    let mut folded = rel.abs();
    if folded > T::FRAC_PI_2() {
        folded = T::PI() - folded;
    }
    let deg = folded.to_degrees();
    let sector = if deg < T::lit(FRONT_MAX_DEG) {
        ViewSector::Front
    } else if deg <= T::lit(DIAGONAL_MAX_DEG) {
        ViewSector::Diagonal
    } else {
        ViewSector::Side
    };
    let far_side = if rel.sin() > T::zero() {
        Some(BodySide::Right)
    } else if rel.sin() < T::zero() {
        Some(BodySide::Left)
    } else {
        None
    };
    ViewGeometry { sector, far_side, folded_bearing: folded }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct LimbFactors<T> {
    pub shoulder: T,
    pub arm: T,
    pub foot: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct SectorFactors<T> {
    pub diagonal: LimbFactors<T>,
    pub side: LimbFactors<T>,
}

/// Jitter multipliers for far-side joints, by VRU type and view sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct OcclusionTable<T> {
    pub pedestrian: SectorFactors<T>,
    pub cyclist: SectorFactors<T>,
}

impl<T: Scalar> Default for OcclusionTable<T> {
    fn default() -> Self {
        let same = |f: f64| LimbFactors { shoulder: T::lit(f), arm: T::lit(f), foot: T::lit(f) };
        Self {
            pedestrian: SectorFactors { diagonal: same(1.2), side: same(1.6) },
            cyclist: SectorFactors { diagonal: same(1.6), side: same(2.5) },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Limb {
    Shoulder,
    Arm,
    Foot,
}

fn limb_of(j: JointId) -> Option<Limb> {
    match j.index() {
        16 | 17 => Some(Limb::Shoulder),
        18..=23 => Some(Limb::Arm),
        7 | 8 | 10 | 11 => Some(Limb::Foot),
        _ => None,
    }
}

impl<T: Scalar> OcclusionTable<T> {
    pub fn validate(&self) -> crate::Result<()> {
        let all = [self.pedestrian, self.cyclist]
            .into_iter()
            .flat_map(|s| [s.diagonal, s.side])
            .flat_map(|l| [l.shoulder, l.arm, l.foot]);
        for f in all {
            if !(f >= T::one()) {
                return Err(crate::Error::InvalidParameter("occlusion multipliers must be >= 1".into()));
            }
        }
        Ok(())
    }

    /// Jitter factor for joint `j`: 1 unless the joint is a far-side
    /// shoulder, arm or foot joint seen from a diagonal or side view.
    pub fn multiplier(&self, sector: ViewSector, far_side: Option<BodySide>, j: JointId, vru: VruKind) -> T {
        let table = match vru {
            VruKind::Pedestrian => &self.pedestrian,
            VruKind::Cyclist => &self.cyclist,
        };
        let factors = match sector {
            ViewSector::Front => return T::one(),
            ViewSector::Diagonal => &table.diagonal,
            ViewSector::Side => &table.side,
        };
        if far_side.is_none() || j.side() != far_side {
            return T::one();
        }
        match limb_of(j) {
            Some(Limb::Shoulder) => factors.shoulder,
            Some(Limb::Arm) => factors.arm,
            Some(Limb::Foot) => factors.foot,
            None => T::one(),
        }
    }
}

/// Free-standing form of [`OcclusionTable::multiplier`] on the default table.
pub fn occlusion_multiplier<T: Scalar>(sector: ViewSector, far_side: Option<BodySide>, j: JointId, vru: VruKind) -> T {
    OcclusionTable::default().multiplier(sector, far_side, j, vru)
}

/// Time window during which the detector reports a spurious upper-body twist
/// (a cyber-physical avatar artifact).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct TwistArtifact<T> {
    pub t_start: T,
    pub t_end: T,
    pub angle: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct NoiseModel<T> {
    /// Depth noise floor, meters.
    pub depth_sigma_a: T,
    /// Quadratic depth noise growth, 1/m.
    pub depth_sigma_b: T,
    pub lateral_sigma: T,
    pub joint_jitter_base: T,
    pub occlusion_multipliers: OcclusionTable<T>,
    /// Per-frame probability of dropping a visible VRU.
    pub no_detect_rate: T,
    /// Only applied in the cyber-physical domain.
    pub twist_artifacts: Vec<TwistArtifact<T>>,
}

impl<T: Scalar> Default for NoiseModel<T> {
    fn default() -> Self {
        Self {
            depth_sigma_a: T::lit(0.01),
            depth_sigma_b: T::lit(2.0e-4),
            lateral_sigma: T::lit(0.02),
            joint_jitter_base: T::lit(0.008),
            occlusion_multipliers: OcclusionTable::default(),
            no_detect_rate: T::zero(),
            twist_artifacts: Vec::new(),
        }
    }
}

impl<T: Scalar> NoiseModel<T> {
    /// A model that reports ground truth exactly.
    pub fn noiseless() -> Self {
        Self {
            depth_sigma_a: T::zero(),
            depth_sigma_b: T::zero(),
            lateral_sigma: T::zero(),
            joint_jitter_base: T::zero(),
            occlusion_multipliers: OcclusionTable::default(),
            no_detect_rate: T::zero(),
            twist_artifacts: Vec::new(),
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let sigmas = [self.depth_sigma_a, self.depth_sigma_b, self.lateral_sigma, self.joint_jitter_base];
        if sigmas.iter().any(|s| !(*s >= T::zero())) {
            return Err(crate::Error::InvalidParameter("noise sigmas must be >= 0".into()));
        }
        if !(self.no_detect_rate >= T::zero() && self.no_detect_rate <= T::one()) {
            return Err(crate::Error::InvalidParameter("no_detect_rate must be in [0, 1]".into()));
        }
        self.occlusion_multipliers.validate()
    }

    /// Depth noise standard deviation at distance `d`: `a + b d^2`.
    pub fn depth_sigma(&self, d: T) -> T {
        self.depth_sigma_a + self.depth_sigma_b * d * d
    }
}

/// Free-standing form of [`NoiseModel::depth_sigma`].
pub fn depth_sigma<T: Scalar>(noise: &NoiseModel<T>, d: T) -> T {
    noise.depth_sigma(d)
}
