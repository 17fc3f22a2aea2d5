//! The twelve catalog test cases: {pedestrian, cyclist} x {RW, CP} x {S, D, C}.
//!
//! The vehicle starts at the origin facing +x with the camera on its nose.
//! S: the VRU starts 24 m ahead walking away; an arm raise starts following
//! and the vehicle closes to the 5 m setpoint. D: the VRU crosses diagonally
//! away past a cone. C: the VRU moves on a 10 m circle around the vehicle,
//! showing it the left side. In D and C the vehicle stays idle.

use crate::domain::{Domain, Perspective, VruKind};
use crate::geom::Pose2;
use crate::motion::{CyclistParams, GaitParams, GestureInterval, GestureKind, PathShape, PathSpec};
use crate::perception::{CameraModel, DistractorObject, NoiseModel, TwistArtifact};
use crate::scalar::Scalar;
use crate::skeleton::BodySide;
use crate::vehicle::TffParams;
use crate::{Error, Result};

use super::config::{ScenarioConfig, VehicleConfig, VruParams};

pub const CATALOG_IDS: std::ops::RangeInclusive<u32> = 1..=12;

/// Calibrated quadratic depth-noise coefficient per VRU type and domain.
/// Produced by `calibrate_depth_noise` on the catalog seeds (see the
/// `calibrate_noise` example); targets at the 20 m bin are 0.16 m for
/// pedestrians in both domains, 0.23 m for CP cyclists, 0.43 m for RW cyclists.
pub const DEPTH_SIGMA_B_PEDESTRIAN: f64 = 1.42e-4;
pub const DEPTH_SIGMA_B_CYCLIST_CP: f64 = 2.2e-4;
pub const DEPTH_SIGMA_B_CYCLIST_RW: f64 = 3.52e-4;

/// Per-joint jitter base; the real-world cyclist is noisier.
pub const JITTER_BASE: f64 = 0.008;
pub const JITTER_BASE_CYCLIST_RW: f64 = 0.015;

/// Handlebar wobble of real riders.
pub const RW_WOBBLE_AMPLITUDE: f64 = 0.08;
pub const RW_WOBBLE_FREQUENCY: f64 = 0.8;

/// Speed cap of the follow controller in the S cases, so that the approach
/// from 24 m to 5 m is sampled densely.
pub const S_FOLLOW_SPEED_CAP: f64 = 2.6;

/// (VRU, domain, perspective) of a catalog id.
pub fn catalog_triple(id: u32) -> Result<(VruKind, Domain, Perspective)> {
    if !CATALOG_IDS.contains(&id) {
        return Err(Error::UnknownCatalogId(id));
    }
    let k = id - 1;
    let vru = if k < 6 { VruKind::Pedestrian } else { VruKind::Cyclist };
    let domain = if k % 6 < 3 { Domain::Rw } else { Domain::Cp };
    let perspective = [Perspective::S, Perspective::D, Perspective::C][(k % 3) as usize];
    Ok((vru, domain, perspective))
}

/// Catalog id for a triple.
pub fn catalog_id(vru: VruKind, domain: Domain, perspective: Perspective) -> u32 {
    let base = match vru {
        VruKind::Pedestrian => 0,
        VruKind::Cyclist => 6,
    } + match domain {
        Domain::Rw => 0,
        Domain::Cp => 3,
    };
    base + match perspective {
        Perspective::S => 1,
        Perspective::D => 2,
        Perspective::C => 3,
    }
}

pub fn catalog_seed(id: u32) -> u64 {
    0x5EED_0000 + u64::from(id)
}

pub fn depth_sigma_b(vru: VruKind, domain: Domain) -> f64 {
    match (vru, domain) {
        (VruKind::Pedestrian, _) => DEPTH_SIGMA_B_PEDESTRIAN,
        (VruKind::Cyclist, Domain::Cp) => DEPTH_SIGMA_B_CYCLIST_CP,
        (VruKind::Cyclist, Domain::Rw) => DEPTH_SIGMA_B_CYCLIST_RW,
    }
}

fn raise<T: Scalar>(t0: f64, t1: f64, side: BodySide, kind: GestureKind) -> GestureInterval<T> {
    GestureInterval { t_start: T::lit(t0), t_end: T::lit(t1), side, kind }
}

/// Catalog scenario with its documented default geometry.
pub fn scenario_from_catalog<T: Scalar>(id: u32) -> Result<ScenarioConfig<T>> {
    let (vru, domain, perspective) = catalog_triple(id)?;
    let l = T::lit;
    let speed = match vru {
        VruKind::Pedestrian => 1.4,
        VruKind::Cyclist => 1.67,
    };

    let (path, duration, distractors) = match perspective {
        Perspective::S => {
            let duration = 40.0;
            (PathSpec::straight(l(speed * duration + 1.0), Pose2::new(l(24.0), T::zero(), T::zero())), duration, vec![])
        }
        Perspective::D => {
            let length = 12.0;
            let cone = DistractorObject { x: l(11.0), y: l(-1.0), height: l(0.75), false_positive_rate: l(0.1) };
            let origin = Pose2::new(l(7.5), l(-2.5), l(45f64.to_radians()));
            (PathSpec { shape: PathShape::Straight { length: l(length) }, origin }, (length / speed).ceil(), vec![cone])
        }
        Perspective::C => {
            let (radius, arc) = (10.0, 60f64.to_radians());
            let start = -30f64.to_radians();
            let origin =
                Pose2::new(l(radius * start.cos()), l(radius * start.sin()), l(start + std::f64::consts::FRAC_PI_2));
            let spec = PathSpec { shape: PathShape::Circle { radius: l(radius), arc: l(arc) }, origin };
            (spec, (radius * arc / speed).ceil(), vec![])
        }
    };

    let gestures = match perspective {
        Perspective::S => vec![raise(0.2, 1.7, BodySide::Right, GestureKind::RaiseAboveHead)],
        _ => vec![],
    };
    let vru_params = match vru {
        VruKind::Pedestrian => {
            let mut schedule = gestures;
            if domain == Domain::Rw && perspective == Perspective::C {
                schedule.push(raise(3.0, 4.5, BodySide::Left, GestureKind::WatchCheck));
            }
            VruParams::Pedestrian(GaitParams {
                speed: l(speed),
                arm_gesture_schedule: schedule,
                ..GaitParams::default()
            })
        }
        VruKind::Cyclist => {
            let wobble = if domain == Domain::Rw { RW_WOBBLE_AMPLITUDE } else { 0.0 };
            VruParams::Cyclist(CyclistParams {
                speed: l(speed),
                wobble_amplitude: l(wobble),
                wobble_frequency: l(RW_WOBBLE_FREQUENCY),
                arm_gesture_schedule: gestures,
                ..CyclistParams::default()
            })
        }
    };

    let jitter = if (vru, domain) == (VruKind::Cyclist, Domain::Rw) { JITTER_BASE_CYCLIST_RW } else { JITTER_BASE };
    let mut noise = NoiseModel {
        depth_sigma_a: l(0.01),
        depth_sigma_b: l(depth_sigma_b(vru, domain)),
        joint_jitter_base: l(jitter),
        ..NoiseModel::default()
    };
    if (vru, domain, perspective) == (VruKind::Pedestrian, Domain::Cp, Perspective::S) {
        noise.twist_artifacts.push(TwistArtifact { t_start: l(30.0), t_end: l(30.5), angle: l(0.35) });
    }

    let mut controller = TffParams::default();
    if perspective == Perspective::S {
        controller.v_max = l(S_FOLLOW_SPEED_CAP);
    }

    Ok(ScenarioConfig {
        test_case_id: Some(id),
        domain,
        perspective,
        vru: vru_params,
        path,
        vehicle: VehicleConfig::default(),
        camera: CameraModel::default(),
        noise,
        distractors,
        controller,
        duration: l(duration),
        dt: l(0.05),
        seed: catalog_seed(id),
    })
}

/// A catalog id's RW/CP twin.
pub fn twin_id(id: u32) -> Result<u32> {
    let (vru, domain, perspective) = catalog_triple(id)?;
    let other = match domain {
        Domain::Rw => Domain::Cp,
        Domain::Cp => Domain::Rw,
    };
    Ok(catalog_id(vru, other, perspective))
}
