//! Fixed-step closed loop: motion, sensing, planning, vehicle step, logging.

use serde::{Deserialize, Serialize};

use crate::geom::{Pose2, Vec3};
use crate::metrics::{AnalysisParams, SeriesSet, StabilityReport};
use crate::motion::{
    articulate_cyclist_body, articulate_pedestrian_body, body_to_world, cyclist_frame_at, pedestrian_frame_at,
    pose_gesture_arm, GestureKind,
};
use crate::perception::{frame_rng, is_visible, sense, Scene, VruTruth};
use crate::scalar::{wrap_angle, Scalar};
use crate::skeleton::{BodySide, FrameTag, SkeletonFrame};
use crate::vehicle::{select_target_detection, step_vehicle, tff_plan, TffState, VehicleState};
use crate::Result;

use super::config::{ScenarioConfig, VruParams};
use super::log::{FrameRecord, RunLog, TffRecord};

/// Subject id of the simulated VRU.
pub const VRU_SUBJECT_ID: i64 = 1;

pub const MAX_HEADING_RATE: f64 = 2.0;
pub const MAX_TELEOP_SPEED: f64 = 3.0;

/// Operator control of the VRU root, replacing the scripted path.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TeleopInput<T> {
    /// Turn rate, rad/s.
    pub heading_delta: T,
    pub speed_target: T,
    /// Arm raise for this tick only.
    pub gesture: bool,
}

impl<T: Scalar> TeleopInput<T> {
    /// Clamped to the supported ranges.
    pub fn clamped(self) -> Self {
        let hmax = T::lit(MAX_HEADING_RATE);
        Self {
            heading_delta: self.heading_delta.max(-hmax).min(hmax),
            speed_target: self.speed_target.max(T::zero()).min(T::lit(MAX_TELEOP_SPEED)),
            gesture: self.gesture,
        }
    }
}

/// Inputs keyed by the tick at which they take effect. Heading rate and speed
/// persist until replaced; a gesture applies to its own tick only.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct InputSchedule<T> {
    pub entries: Vec<(u64, TeleopInput<T>)>,
}

impl<T: Scalar> InputSchedule<T> {
    /// Input in effect at `tick`.
    pub fn at(&self, tick: u64) -> TeleopInput<T> {
        let mut cur = TeleopInput::default();
        for (k, inp) in &self.entries {
            if *k > tick {
                break;
            }
            cur = TeleopInput { gesture: *k == tick && inp.gesture, ..*inp };
        }
        cur
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct TeleopState<T> {
    root: Pose2<T>,
    phase_time: T,
}

/// Live metric readout for telemetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LiveMetrics<T> {
    pub hip_distance: Option<T>,
    pub rolling_variability: Option<T>,
    pub no_detects: u64,
    pub false_detects: u64,
}

/// One scenario's mutable loop state.
#[derive(Debug, Clone)]
pub struct Simulation<T: Scalar> {
    cfg: ScenarioConfig<T>,
    tick: u64,
    vehicle: VehicleState<T>,
    tff: TffState<T>,
    teleop: Option<TeleopState<T>>,
    series: SeriesSet<T>,
    no_detects: u64,
    false_detects: u64,
}

impl<T: Scalar> Simulation<T> {
    /// Scripted run along the configured path.
    pub fn new(cfg: ScenarioConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let vehicle = VehicleState::at_rest(cfg.vehicle.init, cfg.vehicle.wheelbase);
        let tff = TffState::new(cfg.controller);
        Ok(Self { cfg, tick: 0, vehicle, tff, teleop: None, series: SeriesSet::new(), no_detects: 0, false_detects: 0 })
    }

    /// Operator-driven run: the VRU starts at the path origin and follows
    /// [`TeleopInput`]s.
    pub fn new_teleop(cfg: ScenarioConfig<T>) -> Result<Self> {
        let mut sim = Self::new(cfg)?;
        sim.teleop = Some(TeleopState { root: sim.cfg.path.origin, phase_time: T::zero() });
        Ok(sim)
    }

    pub fn config(&self) -> &ScenarioConfig<T> {
        &self.cfg
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn finished(&self) -> bool {
        self.tick >= self.cfg.tick_count()
    }

    pub fn vehicle(&self) -> &VehicleState<T> {
        &self.vehicle
    }

    pub fn tff(&self) -> &TffState<T> {
        &self.tff
    }

    pub fn live_metrics(&self) -> LiveMetrics<T> {
        LiveMetrics {
            hip_distance: self.series.last_hip_distance(),
            rolling_variability: self.series.rolling_variability(11),
            no_detects: self.no_detects,
            false_detects: self.false_detects,
        }
    }

    fn vru_truth(&mut self, t: T, input: Option<TeleopInput<T>>) -> Result<(SkeletonFrame<T>, Pose2<T>)> {
        let dt = self.cfg.dt;
        let Some(state) = self.teleop.as_mut() else {
            return match &self.cfg.vru {
                VruParams::Pedestrian(g) => pedestrian_frame_at(t, &self.cfg.path, g, VRU_SUBJECT_ID),
                VruParams::Cyclist(c) => cyclist_frame_at(t, &self.cfg.path, c, VRU_SUBJECT_ID),
            };
        };
        let inp = input.unwrap_or_default().clamped();
        if self.tick > 0 {
            let yaw = wrap_angle(state.root.yaw + inp.heading_delta * dt);
            let step = inp.speed_target * dt;
            state.root = Pose2::new(state.root.x + step * yaw.cos(), state.root.y + step * yaw.sin(), yaw);
            if inp.speed_target > T::zero() {
                state.phase_time = state.phase_time + dt;
            }
        }
        let walking = inp.speed_target > T::zero();
        let gesture = inp.gesture.then_some((BodySide::Right, GestureKind::RaiseAboveHead));
        let body = match &self.cfg.vru {
            VruParams::Pedestrian(g) => articulate_pedestrian_body(g, state.phase_time, walking, gesture),
            VruParams::Cyclist(c) => {
                let mut b = articulate_cyclist_body(c, state.phase_time);
                if let Some((side, kind)) = gesture {
                    pose_gesture_arm(&mut b, side, kind, c.body_height / T::lit(1.75));
                }
                b
            }
        };
        let frame = SkeletonFrame::new(t, VRU_SUBJECT_ID, FrameTag::World, body_to_world(&state.root, body));
        Ok((frame, state.root))
    }

    /// Advances one tick and returns its record. `input` is only used in
    /// teleop mode.
    pub fn step(&mut self, input: Option<TeleopInput<T>>) -> Result<FrameRecord<T>> {
        let cfg_dt = self.cfg.dt;
        let t = cfg_dt * T::from_u64(self.tick).expect("tick representable");
        let (skeleton, root) = self.vru_truth(t, input)?;
        let truth = VruTruth { kind: self.cfg.vru_kind(), skeleton, root };
        let scene = Scene { time: t, vrus: vec![truth], distractors: self.cfg.distractors.clone() };

        let mut rng = frame_rng(self.cfg.seed, self.tick);
        let detections = sense(&scene, &self.cfg.camera, &self.vehicle, &self.cfg.noise, self.cfg.domain, &mut rng);
        let truth = &scene.vrus[0];
        let visible = is_visible(&self.cfg.camera, &self.vehicle, truth);

        let target = select_target_detection(&detections, &self.cfg.camera);
        let plan = tff_plan(&self.tff, target, &self.cfg.camera, cfg_dt);

        let cam = self.cfg.camera.position_in_vehicle();
        let planar = |p: Vec3<T>| (p.x - cam.x).hypot(p.y - cam.y);
        let hip_truth = self.vehicle.pose().to_local(truth.skeleton.hip());
        let record = FrameRecord {
            tick: self.tick,
            timestamp: t,
            vehicle: self.vehicle,
            tff: TffRecord {
                mode: plan.state.mode,
                target_subject: plan.state.target_subject,
                v_cmd: plan.command.v_cmd,
                steer: plan.command.steer,
                gesture: plan.gesture,
                toggled: plan.toggled,
                target_offset_angle: plan.measurement.map(|m| m.offset_angle),
            },
            vru_root: truth.root,
            vru: truth.skeleton.clone(),
            hip_distance_est: detections
                .iter()
                .find(|d| d.source == crate::perception::DetectionSource::TrueVru && d.subject_id == VRU_SUBJECT_ID)
                .map(|d| planar(d.hip())),
            detections,
            visible: Some(visible),
            hip_distance_truth: planar(hip_truth),
            input: self.teleop.as_ref().map(|_| input.unwrap_or_default().clamped()),
        };

        self.vehicle =
            step_vehicle(&self.vehicle, plan.command.steer, plan.command.v_cmd, cfg_dt, &self.cfg.vehicle.limits)?;
        self.tff = plan.state;
        self.series.push(&record);
        if visible && record.true_detection().is_none() {
            self.no_detects += 1;
        }
        if record.detections.len() > 1 {
            self.false_detects += 1;
        }
        self.tick += 1;
        Ok(record)
    }

    /// Report from the quantities accumulated while running.
    pub fn online_report(&self, params: &AnalysisParams<T>) -> Result<StabilityReport<T>> {
        self.series.report(self.cfg.meta(), params)
    }
}

/// Result of a scripted run: the log plus the report computed during it.
#[derive(Debug, Clone)]
pub struct RunOutput<T: Scalar> {
    pub log: RunLog<T>,
    pub online_report: StabilityReport<T>,
}

/// Runs a scenario to completion.
pub fn run_scenario<T: Scalar>(cfg: &ScenarioConfig<T>) -> Result<RunLog<T>> {
    Ok(run_scenario_with_report(cfg, &AnalysisParams::default())?.log)
}

pub fn run_scenario_with_report<T: Scalar>(
    cfg: &ScenarioConfig<T>,
    params: &AnalysisParams<T>,
) -> Result<RunOutput<T>> {
    params.validate()?;
    let mut sim = Simulation::new(cfg.clone())?;
    let mut frames = Vec::with_capacity(cfg.tick_count() as usize);
    while !sim.finished() {
        frames.push(sim.step(None)?);
    }
    let online_report = sim.online_report(params)?;
    Ok(RunOutput { log: RunLog { meta: cfg.meta(), config: cfg.clone(), frames }, online_report })
}

/// Teleop run driven by a fixed input schedule, for `ticks` ticks.
pub fn run_with_inputs<T: Scalar>(
    cfg: &ScenarioConfig<T>,
    schedule: &InputSchedule<T>,
    ticks: u64,
) -> Result<RunLog<T>> {
    let mut sim = Simulation::new_teleop(cfg.clone())?;
    let mut frames = Vec::with_capacity(ticks as usize);
    for k in 0..ticks {
        frames.push(sim.step(Some(schedule.at(k)))?);
    }
    Ok(RunLog { meta: cfg.meta(), config: cfg.clone(), frames })
}
