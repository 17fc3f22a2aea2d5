//! Desk-scale cyber-physical VRU test bench: synthetic pedestrian and cyclist
//! motion, an emulated monocular 3D pose sensor, a track-and-follow vehicle,
//! projection-stimulation geometry and the RW-versus-CP stability metrics.
//!
//! Numerical code is generic over [`scalar::Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix `f64`, with `f32` variants under [`single`].

pub mod domain;
pub mod error;
pub mod geom;
pub mod harness;
pub mod metrics;
pub mod motion;
pub mod perception;
pub mod scalar;
pub mod skeleton;
pub mod stimulation;
pub mod vehicle;

pub use domain::{Domain, Perspective, VruKind};
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Vec3 = geom::Vec3<f64>;
pub type Pose2 = geom::Pose2<f64>;
pub type SkeletonFrame = skeleton::SkeletonFrame<f64>;
pub type PathSpec = motion::PathSpec<f64>;
pub type GaitParams = motion::GaitParams<f64>;
pub type CyclistParams = motion::CyclistParams<f64>;
pub type CameraModel = perception::CameraModel<f64>;
pub type NoiseModel = perception::NoiseModel<f64>;
pub type Detection = perception::Detection<f64>;
pub type DistractorObject = perception::DistractorObject<f64>;
pub type VehicleState = vehicle::VehicleState<f64>;
pub type TffState = vehicle::TffState<f64>;
pub type PidState = vehicle::PidState<f64>;
pub type ProjectionGeometry = stimulation::ProjectionGeometry<f64>;
pub type ScenarioConfig = harness::ScenarioConfig<f64>;
pub type FrameRecord = harness::FrameRecord<f64>;
pub type RunLog = harness::RunLog<f64>;
pub type StabilityReport = metrics::StabilityReport<f64>;
pub type ComparisonTable = metrics::ComparisonTable<f64>;
pub type AnalysisParams = metrics::AnalysisParams<f64>;

/// Single-precision aliases.
pub mod single {
    pub type Vec3 = crate::geom::Vec3<f32>;
    pub type SkeletonFrame = crate::skeleton::SkeletonFrame<f32>;
    pub type CameraModel = crate::perception::CameraModel<f32>;
    pub type VehicleState = crate::vehicle::VehicleState<f32>;
    pub type ScenarioConfig = crate::harness::ScenarioConfig<f32>;
    pub type RunLog = crate::harness::RunLog<f32>;
    pub type StabilityReport = crate::metrics::StabilityReport<f32>;
}
