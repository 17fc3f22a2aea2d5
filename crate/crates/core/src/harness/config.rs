//! Scenario configuration and its validation.

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Perspective, VruKind};
use crate::geom::Pose2;
use crate::motion::{CyclistParams, GaitParams, PathSpec};
use crate::perception::{CameraModel, DistractorObject, NoiseModel};
use crate::scalar::Scalar;
use crate::vehicle::{TffParams, VehicleLimits};
use crate::{Error, Result};

use super::catalog::catalog_triple;
use super::log::RunMeta;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound = "T: Scalar")]
pub enum VruParams<T> {
    Pedestrian(GaitParams<T>),
    Cyclist(CyclistParams<T>),
}

impl<T: Scalar> VruParams<T> {
    pub fn kind(&self) -> VruKind {
        match self {
            VruParams::Pedestrian(_) => VruKind::Pedestrian,
            VruParams::Cyclist(_) => VruKind::Cyclist,
        }
    }

    pub fn speed(&self) -> T {
        match self {
            VruParams::Pedestrian(g) => g.speed,
            VruParams::Cyclist(c) => c.speed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct VehicleConfig<T> {
    pub init: Pose2<T>,
    pub wheelbase: T,
    pub limits: VehicleLimits<T>,
}

impl<T: Scalar> Default for VehicleConfig<T> {
    fn default() -> Self {
        Self { init: Pose2::identity(), wheelbase: T::lit(2.8), limits: VehicleLimits::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct ScenarioConfig<T> {
    /// Catalog id 1..=12, or absent for a custom scenario.
    #[serde(default)]
    pub test_case_id: Option<u32>,
    pub domain: Domain,
    pub perspective: Perspective,
    pub vru: VruParams<T>,
    pub path: PathSpec<T>,
    #[serde(default)]
    pub vehicle: VehicleConfig<T>,
    #[serde(default)]
    pub camera: CameraModel<T>,
    #[serde(default)]
    pub noise: NoiseModel<T>,
    #[serde(default)]
    pub distractors: Vec<DistractorObject<T>>,
    #[serde(default)]
    pub controller: TffParams<T>,
    pub duration: T,
    pub dt: T,
    pub seed: u64,
}

impl<T: Scalar> ScenarioConfig<T> {
    pub fn vru_kind(&self) -> VruKind {
        self.vru.kind()
    }

    pub fn meta(&self) -> RunMeta {
        RunMeta {
            test_case_id: self.test_case_id,
            vru: self.vru_kind(),
            domain: self.domain,
            perspective: self.perspective,
            seed: self.seed,
        }
    }

    /// Number of ticks: `duration / dt`, rounded.
    pub fn tick_count(&self) -> u64 {
        (self.duration / self.dt).round().to_u64().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |path: &str, reason: String| Err(Error::Config { path: path.into(), reason });
        if !(self.duration > T::zero() && self.duration.is_finite()) {
            return cfg("duration", format!("must be > 0, got {}", self.duration));
        }
        if !(self.dt > T::zero()) {
            return cfg("dt", format!("must be > 0, got {}", self.dt));
        }
        let period = T::one() / self.camera.fps;
        if (self.dt - period).abs() > T::lit(1e-6) * period {
            return cfg("dt", format!("must equal 1/camera.fps = {period}, got {}", self.dt));
        }
        if self.dt > T::lit(0.1) {
            return cfg("dt", "must be <= 0.1 s".into());
        }
        if let Some(id) = self.test_case_id {
            let (vru, domain, perspective) = catalog_triple(id)?;
            if (vru, domain, perspective) != (self.vru_kind(), self.domain, self.perspective) {
                return cfg(
                    "test_case_id",
                    format!(
                        "catalog id {id} is {vru} {domain} {perspective}, config says {} {} {}",
                        self.vru_kind(),
                        self.domain,
                        self.perspective
                    ),
                );
            }
        }
        let wrap = |path: &'static str| move |e: Error| Error::Config { path: path.into(), reason: e.to_string() };
        self.path.validate().map_err(wrap("path"))?;
        match &self.vru {
            VruParams::Pedestrian(g) => g.validate().map_err(wrap("vru"))?,
            VruParams::Cyclist(c) => c.validate().map_err(wrap("vru"))?,
        }
        self.camera.validate().map_err(wrap("camera"))?;
        self.noise.validate().map_err(wrap("noise"))?;
        for d in &self.distractors {
            d.validate().map_err(wrap("distractors"))?;
        }
        self.controller.validate().map_err(wrap("controller"))?;
        if !(self.vehicle.wheelbase > T::zero()) {
            return cfg("vehicle.wheelbase", "must be > 0".into());
        }
        let l = &self.vehicle.limits;
        if !(l.v_max > T::zero() && l.accel_max > T::zero() && l.steer_max > T::zero()) {
            return cfg("vehicle.limits", "limits must be > 0".into());
        }
        Ok(())
    }

    /// Parses and validates a JSON config, reporting the offending field path.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: match e.path().to_string() {
                p if p == "." => "<root>".into(),
                p => p,
            },
            reason: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
