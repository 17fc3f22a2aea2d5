//! Run logs: one JSON header line followed by one line per tick.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Perspective, VruKind};
use crate::geom::Pose2;
use crate::perception::{Detection, DetectionSource};
use crate::scalar::Scalar;
use crate::skeleton::SkeletonFrame;
use crate::vehicle::{TffMode, VehicleState};
use crate::{Error, Result};

use super::config::ScenarioConfig;
use super::runner::TeleopInput;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub test_case_id: Option<u32>,
    pub vru: VruKind,
    pub domain: Domain,
    pub perspective: Perspective,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TffRecord<T> {
    pub mode: TffMode,
    pub target_subject: Option<i64>,
    pub v_cmd: T,
    pub steer: T,
    pub gesture: bool,
    pub toggled: bool,
    /// Bearing of the target off the camera centerline, positive right.
    pub target_offset_angle: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FrameRecord<T> {
    pub tick: u64,
    pub timestamp: T,
    /// Vehicle state at the sensing instant.
    pub vehicle: VehicleState<T>,
    pub tff: TffRecord<T>,
    pub vru_root: Pose2<T>,
    /// Ground truth, world frame.
    pub vru: SkeletonFrame<T>,
    pub detections: Vec<Detection<T>>,
    pub visible: Option<bool>,
    /// Planar camera-to-hip distance from ground truth.
    pub hip_distance_truth: T,
    /// Same distance from the VRU's detection, if any.
    pub hip_distance_est: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<TeleopInput<T>>,
}

impl<T: Scalar> FrameRecord<T> {
    /// Detection of the simulated VRU (not a false positive).
    pub fn true_detection(&self) -> Option<&Detection<T>> {
        self.detections.iter().find(|d| d.source == DetectionSource::TrueVru && d.subject_id == self.vru.subject_id)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LogHeader<T> {
    pub schema_version: u32,
    pub meta: RunMeta,
    pub config: ScenarioConfig<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RunLog<T> {
    pub meta: RunMeta,
    pub config: ScenarioConfig<T>,
    pub frames: Vec<FrameRecord<T>>,
}

impl<T: Scalar> RunLog<T> {
    pub fn header(&self) -> LogHeader<T> {
        LogHeader { schema_version: SCHEMA_VERSION, meta: self.meta.clone(), config: self.config.clone() }
    }

    pub fn write_jsonl<W: Write>(&self, w: W) -> Result<()> {
        let mut out = LogWriter::new(w, &self.header())?;
        for f in &self.frames {
            out.append(f)?;
        }
        out.finish()?;
        Ok(())
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)?;
        Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
    }

    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));
        let (_, first) = lines.next().ok_or_else(|| Error::LogFormat("empty log".into()))?;
        let header: LogHeader<T> = parse_line(&first?, 1)?;
        if header.schema_version != SCHEMA_VERSION {
            return Err(Error::LogFormat(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                header.schema_version
            )));
        }
        let mut frames = Vec::new();
        for (i, line) in lines {
            frames.push(parse_line(&line?, i + 1)?);
        }
        Ok(Self { meta: header.meta, config: header.config, frames })
    }

    pub fn from_jsonl_str(s: &str) -> Result<Self> {
        Self::read_jsonl(s.as_bytes())
    }

    pub fn read_file(path: &std::path::Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_jsonl(std::io::BufReader::new(f))
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_jsonl(std::io::BufWriter::new(f))
    }
}

/// Streams a log to `W` one frame at a time; the output matches
/// [`RunLog::write_jsonl`] for the same frames.
#[derive(Debug)]
pub struct LogWriter<W: Write> {
    out: W,
}

impl<W: Write> LogWriter<W> {
    pub fn new<T: Scalar>(mut out: W, header: &LogHeader<T>) -> Result<Self> {
        serde_json::to_writer(&mut out, header)?;
        out.write_all(b"\n")?;
        Ok(Self { out })
    }

    pub fn append<T: Scalar>(&mut self, frame: &FrameRecord<T>) -> Result<()> {
        serde_json::to_writer(&mut self.out, frame)?;
        self.out.write_all(b"\n")?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        Ok(self.out.flush()?)
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

fn parse_line<D: serde::de::DeserializeOwned>(line: &str, lineno: usize) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(line);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::LogFormat(format!("line {lineno}, at `{}`: {}", e.path(), e.inner())))
}
