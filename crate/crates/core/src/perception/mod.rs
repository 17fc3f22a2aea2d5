//! Emulated monocular 3D pose sensor: camera geometry, distance-dependent
//! estimation noise, occlusion-driven joint degradation and false-positive
//! injection.

mod camera;
mod noise;
mod sense;

pub use camera::{project_point, CameraModel, CameraMount, Pixel};
pub use noise::{
    depth_sigma, occlusion_multiplier, view_geometry, LimbFactors, NoiseModel, OcclusionTable, SectorFactors,
    TwistArtifact, ViewGeometry, ViewSector, DIAGONAL_MAX_DEG, FRONT_MAX_DEG,
};
pub use sense::{frame_rng, is_visible, sense, Detection, DetectionSource, DistractorObject, Scene, VruTruth};
