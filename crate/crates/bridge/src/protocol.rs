//! Wire messages. Every message is one JSON object with a `type` field and
//! serializes to at most [`MAX_MESSAGE_BYTES`].

use cpsim::geom::Vec3;
use cpsim::harness::{FrameRecord, LiveMetrics, ScenarioConfig, TeleopInput};
use cpsim::perception::DetectionSource;
use cpsim::vehicle::TffMode;
use serde::{Deserialize, Serialize};

pub const PROTOCOL_VERSION: u32 = 1;
pub const MAX_MESSAGE_BYTES: usize = 16 * 1024;

/// Operator command. Magnitudes are clamped on arrival.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputCommand {
    #[serde(default)]
    pub heading_delta: f64,
    #[serde(default)]
    pub speed_target: f64,
    #[serde(default)]
    pub gesture: bool,
    pub client_seq: i64,
}

impl InputCommand {
    pub fn teleop(&self) -> TeleopInput<f64> {
        TeleopInput { heading_delta: self.heading_delta, speed_target: self.speed_target, gesture: self.gesture }
            .clamped()
    }
}

/// Scenario for a reset: a catalog id or a full config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    Catalog(u32),
    Config(Box<ScenarioConfig<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Input(InputCommand),
    Subscribe,
    Unsubscribe,
    Reset {
        scenario: ScenarioRef,
    },
    /// Optional; the server answers with an error if the version differs.
    Hello {
        schema_version: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Hello { schema_version: u32 },
    Snapshot(Box<StateSnapshot>),
    Error { reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleView {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TffView {
    pub mode: TffMode,
    pub v_cmd: f64,
    pub steer: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VruView {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
    /// World frame, SMPL order.
    pub joints: Vec<Vec3<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionView {
    pub subject_id: i64,
    pub source: DetectionSource,
    /// Vehicle frame.
    pub hip: Vec3<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    /// Server-wide tick counter; keeps increasing across resets.
    pub tick: u64,
    /// Time since the current scenario started.
    pub sim_time: f64,
    pub session: u32,
    pub vehicle: VehicleView,
    pub tff: TffView,
    pub vru: VruView,
    pub detections: Vec<DetectionView>,
    pub metrics: LiveMetrics<f64>,
    /// Control applied this tick.
    pub input: TeleopInput<f64>,
    /// `client_seq` of the command that set it, if any.
    pub input_seq: Option<i64>,
}

impl StateSnapshot {
    pub fn from_record(
        tick: u64,
        session: u32,
        rec: &FrameRecord<f64>,
        metrics: LiveMetrics<f64>,
        input_seq: Option<i64>,
    ) -> Self {
        let v = &rec.vehicle;
        Self {
            tick,
            sim_time: rec.timestamp,
            session,
            vehicle: VehicleView { x: v.x, y: v.y, yaw: v.yaw, v: v.v },
            tff: TffView { mode: rec.tff.mode, v_cmd: rec.tff.v_cmd, steer: rec.tff.steer },
            vru: VruView {
                x: rec.vru_root.x,
                y: rec.vru_root.y,
                yaw: rec.vru_root.yaw,
                joints: rec.vru.joints.to_vec(),
            },
            detections: rec
                .detections
                .iter()
                .map(|d| DetectionView { subject_id: d.subject_id, source: d.source, hip: d.hip() })
                .collect(),
            metrics,
            input: rec.input.unwrap_or_default(),
            input_seq,
        }
    }
}

/// Parses a client message, enforcing the size limit.
pub fn parse_client_message(text: &str) -> Result<ClientMessage, String> {
    if text.len() > MAX_MESSAGE_BYTES {
        return Err(format!("message of {} bytes exceeds {MAX_MESSAGE_BYTES}", text.len()));
    }
    serde_json::from_str(text).map_err(|e| e.to_string())
}

pub fn encode(msg: &ServerMessage) -> String {
    serde_json::to_string(msg).expect("server messages always serialize")
}
