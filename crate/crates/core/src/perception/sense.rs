use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, VruKind};
use crate::geom::{Pose2, Vec3};
use crate::scalar::Scalar;
use crate::skeleton::{rest_pose, FrameTag, JointId, SkeletonFrame, NUM_JOINTS};
use crate::vehicle::VehicleState;

use super::camera::CameraModel;
use super::noise::{view_geometry, NoiseModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionSource {
    TrueVru,
    DistractorFalsePositive,
}

/// One person reported by the emulated pose estimator. Skeleton joints are in
/// the vehicle frame. Injected false positives carry negative subject ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Detection<T> {
    pub subject_id: i64,
    pub skeleton: SkeletonFrame<T>,
    pub source: DetectionSource,
}

impl<T: Scalar> Detection<T> {
    pub fn hip(&self) -> Vec3<T> {
        self.skeleton.hip()
    }
}

/// Static scene object that may be mistaken for a person.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct DistractorObject<T> {
    pub x: T,
    pub y: T,
    pub height: T,
    /// Per-frame probability, applied only in the CP domain while in view.
    pub false_positive_rate: T,
}

impl<T: Scalar> DistractorObject<T> {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.false_positive_rate >= T::zero() && self.false_positive_rate <= T::one()) {
            return Err(crate::Error::InvalidParameter("false_positive_rate must be in [0, 1]".into()));
        }
        if !(self.height > T::zero()) {
            return Err(crate::Error::InvalidParameter("distractor height must be > 0".into()));
        }
        Ok(())
    }
}

/// Ground truth for one VRU at the sensing instant.
#[derive(Debug, Clone, PartialEq)]
pub struct VruTruth<T> {
    pub kind: VruKind,
    /// World frame.
    pub skeleton: SkeletonFrame<T>,
    pub root: Pose2<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene<T> {
    pub time: T,
    pub vrus: Vec<VruTruth<T>>,
    pub distractors: Vec<DistractorObject<T>>,
}

/// Deterministic per-frame random stream.
pub fn frame_rng(seed: u64, tick: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tick);
    rng
}

/// Whether the VRU's hip projects into the image.
pub fn is_visible<T: Scalar>(camera: &CameraModel<T>, vehicle: &VehicleState<T>, truth: &VruTruth<T>) -> bool {
    super::camera::project_point(camera, truth.skeleton.hip(), vehicle).is_some()
}

/// Upper-body joints affected by the twist artifact.
const UPPER_BODY: [usize; 13] = [9, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23];

/// Emulated 3D pose sensing for one camera frame.
///
/// Every visible VRU yields a `TrueVru` detection whose skeleton is ground
/// truth moved by a common root error (depth along the camera ray with
/// `depth_sigma(d)`, lateral and vertical with `lateral_sigma`) plus per-joint
/// jitter scaled by the occlusion multipliers. In the CP domain each distractor
/// in view is reported as a standing person with its false-positive rate.
///
/// The number of random draws per VRU and per distractor is fixed, so the
/// stream layout does not depend on noise magnitudes or domain.
pub fn sense<T: Scalar, R: Rng>(
    scene: &Scene<T>,
    camera: &CameraModel<T>,
    vehicle: &VehicleState<T>,
    noise: &NoiseModel<T>,
    domain: Domain,
    rng: &mut R,
) -> Vec<Detection<T>> {
    let pose = vehicle.pose();
    let cam_world = camera.world_position(vehicle);
    let cam_vehicle = camera.position_in_vehicle();
    let mut out = Vec::with_capacity(scene.vrus.len());

    for truth in &scene.vrus {
        let mut normal = || T::lit(rng.sample::<f64, _>(StandardNormal));
        let z_depth = normal();
        let z_lat = normal();
        let z_up = normal();
        let jitter: Vec<Vec3<T>> = (1..NUM_JOINTS).map(|_| Vec3::new(normal(), normal(), normal())).collect();
        let drop_draw = T::lit(rng.random::<f64>());

        if !is_visible(camera, vehicle, truth) || drop_draw < noise.no_detect_rate {
            continue;
        }

        let local = match truth.skeleton.transform_frame(&pose, FrameTag::Vehicle) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let hip = local.hip();
        let ray = Vec3::new(hip.x - cam_vehicle.x, hip.y - cam_vehicle.y, T::zero());
        let d = ray.planar_norm();
        let along = if d > T::zero() { ray * (T::one() / d) } else { Vec3::new(T::one(), T::zero(), T::zero()) };
        let across = Vec3::new(-along.y, along.x, T::zero());
        let root_error = along * (noise.depth_sigma(d) * z_depth)
            + across * (noise.lateral_sigma * z_lat)
            + Vec3::new(T::zero(), T::zero(), noise.lateral_sigma * z_up);

        let view = view_geometry(&truth.root, cam_world);
        let twist = match domain {
            Domain::Cp => {
                noise.twist_artifacts.iter().find(|a| scene.time >= a.t_start && scene.time < a.t_end).map(|a| a.angle)
            }
            Domain::Rw => None,
        };

        let mut joints = local.joints;
        if let Some(angle) = twist {
            for &i in &UPPER_BODY {
                let rel = joints[i] - hip;
                joints[i] = hip + rel.rotate_z(angle);
            }
        }
        for (k, j) in JointId::all().enumerate() {
            let mut p = joints[k] + root_error;
            if k > 0 {
                let sigma = noise.joint_jitter_base
                    * noise.occlusion_multipliers.multiplier(view.sector, view.far_side, j, truth.kind);
                p = p + jitter[k - 1] * sigma;
            }
            joints[k] = p;
        }
        let skeleton = SkeletonFrame::new(scene.time, truth.skeleton.subject_id, FrameTag::Vehicle, joints);
        out.push(Detection { subject_id: truth.skeleton.subject_id, skeleton, source: DetectionSource::TrueVru });
    }

    for (idx, obj) in scene.distractors.iter().enumerate() {
        let draw = T::lit(rng.random::<f64>());
        if domain != Domain::Cp || draw >= obj.false_positive_rate {
            continue;
        }
        let center = pose.to_local(Vec3::new(obj.x, obj.y, obj.height / T::lit(2.0)));
        if camera.project_vehicle_point(center).is_none() {
            continue;
        }
        // Fixed standing pose facing the camera.
        let facing = Pose2::new(center.x, center.y, (cam_vehicle.y - center.y).atan2(cam_vehicle.x - center.x));
        let joints = rest_pose(T::lit(1.7)).map(|p| facing.to_parent(p));
        let id = -(idx as i64) - 1;
        out.push(Detection {
            subject_id: id,
            skeleton: SkeletonFrame::new(scene.time, id, FrameTag::Vehicle, joints),
            source: DetectionSource::DistractorFalsePositive,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::{pedestrian_frame_at, GaitParams, PathSpec};

    fn scene_at(x: f64, y: f64, t: f64) -> Scene<f64> {
        let gait = GaitParams { speed: 0.0, ..GaitParams::default() };
        let path = PathSpec::straight(10.0, Pose2::new(x, y, 0.0));
        let (skeleton, root) = pedestrian_frame_at(t, &path, &gait, 7).unwrap();
        Scene { time: t, vrus: vec![VruTruth { kind: VruKind::Pedestrian, skeleton, root }], distractors: vec![] }
    }

    fn vehicle() -> VehicleState<f64> {
        VehicleState::new(0.0, 0.0, 0.0, 0.0, 2.8)
    }

    #[test]
    fn noiseless_is_exact() {
        let scene = scene_at(12.0, 1.0, 0.0);
        let cam = CameraModel::default();
        let dets = sense(&scene, &cam, &vehicle(), &NoiseModel::noiseless(), Domain::Rw, &mut frame_rng(1, 0));
        assert_eq!(dets.len(), 1);
        assert_eq!(dets[0].skeleton.joints, scene.vrus[0].skeleton.joints);
        assert_eq!(dets[0].skeleton.frame_tag, FrameTag::Vehicle);
    }

    #[test]
    fn out_of_view_yields_nothing() {
        let scene = scene_at(-8.0, 0.0, 0.0);
        let dets = sense(
            &scene,
            &CameraModel::default(),
            &vehicle(),
            &NoiseModel::default(),
            Domain::Cp,
            &mut frame_rng(1, 0),
        );
        assert!(dets.is_empty());
        let wide = scene_at(5.0, 20.0, 0.0);
        assert!(sense(
            &wide,
            &CameraModel::default(),
            &vehicle(),
            &NoiseModel::default(),
            Domain::Cp,
            &mut frame_rng(1, 0)
        )
        .is_empty());
    }

    #[test]
    fn distractor_only_in_cp() {
        let mut scene = scene_at(12.0, 0.0, 0.0);
        scene.distractors.push(DistractorObject { x: 11.0, y: -1.0, height: 0.75, false_positive_rate: 0.1 });
        let cam = CameraModel::default();
        let noise = NoiseModel::default();
        let (mut rw, mut cp) = (0, 0);
        for tick in 0..10_000u64 {
            let count = |domain| {
                sense(&scene, &cam, &vehicle(), &noise, domain, &mut frame_rng(99, tick))
                    .iter()
                    .filter(|d| d.source == DetectionSource::DistractorFalsePositive)
                    .count()
            };
            rw += count(Domain::Rw);
            cp += count(Domain::Cp);
        }
        assert_eq!(rw, 0);
        // Binomial(10^4, 0.1): mean 1000, sd 30.
        assert!((cp as f64 - 1000.0).abs() < 150.0, "{cp}");
    }

    #[test]
    fn deterministic_streams() {
        let scene = scene_at(15.0, 0.5, 0.0);
        let cam = CameraModel::default();
        let noise = NoiseModel::default();
        let a = sense(&scene, &cam, &vehicle(), &noise, Domain::Cp, &mut frame_rng(5, 17));
        let b = sense(&scene, &cam, &vehicle(), &noise, Domain::Cp, &mut frame_rng(5, 17));
        let c = sense(&scene, &cam, &vehicle(), &noise, Domain::Cp, &mut frame_rng(5, 18));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn unbiased_hip_noise() {
        let scene = scene_at(15.0, 0.0, 0.0);
        let cam = CameraModel::default();
        let noise = NoiseModel::default();
        let n = 10_000;
        let truth = scene.vrus[0].skeleton.hip();
        let mut sum = Vec3::zero();
        for tick in 0..n {
            let d = sense(&scene, &cam, &vehicle(), &noise, Domain::Rw, &mut frame_rng(3, tick as u64));
            sum = sum + (d[0].hip() - truth);
        }
        let mean = sum * (1.0 / n as f64);
        let sd_depth = noise.depth_sigma(15.0);
        assert!(mean.x.abs() < 3.0 * sd_depth / (n as f64).sqrt(), "{mean:?}");
        assert!(mean.y.abs() < 3.0 * noise.lateral_sigma / (n as f64).sqrt());
        assert!(mean.z.abs() < 3.0 * noise.lateral_sigma / (n as f64).sqrt());
    }

    #[test]
    fn variance_grows_with_distance() {
        let cam = CameraModel::default();
        let noise = NoiseModel::default();
        let mut prev = 0.0;
        for d in [5.0, 9.0, 13.0, 17.0, 21.0, 24.0] {
            let scene = scene_at(d, 0.0, 0.0);
            let truth = scene.vrus[0].skeleton.hip();
            let n = 4000;
            let var: f64 = (0..n)
                .map(|tick| {
                    let det = sense(&scene, &cam, &vehicle(), &noise, Domain::Rw, &mut frame_rng(11, tick));
                    (det[0].hip() - truth).planar_norm().powi(2)
                })
                .sum::<f64>()
                / n as f64;
            assert!(var >= prev, "d={d}: {var} < {prev}");
            prev = var;
        }
    }
}
