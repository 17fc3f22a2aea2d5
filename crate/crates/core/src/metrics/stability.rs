//! Detection reliability, relative distance stability and joint stability
//! over run logs.

use serde::{Deserialize, Serialize};

use crate::harness::{FrameRecord, RunLog, RunMeta};
use crate::scalar::Scalar;
use crate::skeleton::{JointId, NUM_JOINTS};
use crate::{Error, Result};

use super::filter::{local_variability, percentile, sample_sd, smooth_series};

/// How joint distance series are treated before taking the SD.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SdMode {
    /// SD of the distance series itself.
    Raw,
    /// SD of the series minus its moving-mean + spline smooth.
    #[default]
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct AnalysisParams<T> {
    pub bin_width: T,
    pub bin_min: T,
    pub bin_max: T,
    /// Moving-mean window, odd sample count.
    pub window: usize,
    /// Spline stiffness on a time-in-seconds scale.
    pub lambda: T,
    pub sd_mode: SdMode,
}

impl<T: Scalar> Default for AnalysisParams<T> {
    fn default() -> Self {
        Self {
            bin_width: T::one(),
            bin_min: T::lit(5.0),
            bin_max: T::lit(24.0),
            window: 11,
            lambda: T::one(),
            sd_mode: SdMode::Residual,
        }
    }
}

impl<T: Scalar> AnalysisParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.bin_width > T::zero() && self.bin_max > self.bin_min) {
            return Err(Error::InvalidParameter("bin_width must be > 0 and bin_max > bin_min".into()));
        }
        if self.window == 0 || self.window.is_multiple_of(2) {
            return Err(Error::BadWindow { window: self.window, len: 0 });
        }
        if !(self.lambda >= T::zero()) {
            return Err(Error::InvalidParameter("lambda must be >= 0".into()));
        }
        Ok(())
    }

    fn bin_count(&self) -> usize {
        ((self.bin_max - self.bin_min) / self.bin_width).ceil().to_usize().unwrap_or(0)
    }

    fn bin_of(&self, d: T) -> Option<usize> {
        if !(d >= self.bin_min && d <= self.bin_max) {
            return None;
        }
        let k = ((d - self.bin_min) / self.bin_width).floor().to_usize()?;
        Some(k.min(self.bin_count() - 1))
    }
}

/// Local variability summary of one distance bin `[lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DistanceBin<T> {
    pub lower: T,
    pub upper: T,
    pub max: T,
    pub p95: T,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct JointSd<T> {
    pub joint: JointId,
    pub sd: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct StabilityReport<T> {
    pub meta: RunMeta,
    pub params: AnalysisParams<T>,
    pub frames: usize,
    pub no_detects: u64,
    pub false_detects: u64,
    /// Bins without samples are omitted.
    pub distance_variability: Vec<DistanceBin<T>>,
    /// Non-anchor joints with enough samples.
    pub joint_sd: Vec<JointSd<T>>,
}

impl<T: Scalar> StabilityReport<T> {
    pub fn joint(&self, j: JointId) -> Option<T> {
        self.joint_sd.iter().find(|e| e.joint == j).map(|e| e.sd)
    }

    /// Bin containing distance `d`.
    pub fn bin_at(&self, d: T) -> Option<&DistanceBin<T>> {
        self.distance_variability.iter().find(|b| d >= b.lower && d < b.upper)
    }
}

/// Per-tick quantities the metrics need, gathered from a log or live.
#[derive(Debug, Clone, Default)]
pub struct SeriesSet<T> {
    ticks: Vec<u64>,
    times: Vec<T>,
    visible: Vec<Option<bool>>,
    persons: Vec<usize>,
    hip_distance: Vec<Option<T>>,
    joint_distance: Vec<Option<[T; NUM_JOINTS]>>,
}

impl<T: Scalar> SeriesSet<T> {
    pub fn new() -> Self {
        Self {
            ticks: Vec::new(),
            times: Vec::new(),
            visible: Vec::new(),
            persons: Vec::new(),
            hip_distance: Vec::new(),
            joint_distance: Vec::new(),
        }
    }

    pub fn from_frames(frames: &[FrameRecord<T>]) -> Self {
        let mut s = Self::new();
        for f in frames {
            s.push(f);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    pub fn push(&mut self, f: &FrameRecord<T>) {
        self.ticks.push(f.tick);
        self.times.push(f.timestamp);
        self.visible.push(f.visible);
        self.persons.push(f.detections.len());
        self.hip_distance.push(f.hip_distance_est);
        let joints = f.true_detection().and_then(|d| {
            let mut out = [T::zero(); NUM_JOINTS];
            for j in JointId::all() {
                out[j.index()] = d.skeleton.joint_distance_to_anchor(j).ok()?;
            }
            Some(out)
        });
        self.joint_distance.push(joints);
    }

    pub fn no_detects(&self) -> Result<u64> {
        let mut n = 0;
        for (v, f) in self.visible.iter().zip(&self.joint_distance) {
            match v {
                None => return Err(Error::MissingVisibility),
                Some(true) if f.is_none() => n += 1,
                _ => {}
            }
        }
        Ok(n)
    }

    pub fn false_detects(&self) -> u64 {
        self.persons.iter().filter(|&&p| p > 1).count() as u64
    }

    /// Maximal runs of consecutive ticks where `value` is present.
    fn segments(&self, value: impl Fn(usize) -> Option<T>) -> Vec<(Vec<T>, Vec<T>)> {
        let mut out = Vec::new();
        let mut cur: (Vec<T>, Vec<T>) = (Vec::new(), Vec::new());
        let mut last_tick: Option<u64> = None;
        for i in 0..self.len() {
            match value(i) {
                Some(v) if last_tick.is_some_and(|t| t + 1 == self.ticks[i]) || cur.0.is_empty() => {
                    cur.0.push(self.times[i]);
                    cur.1.push(v);
                    last_tick = Some(self.ticks[i]);
                }
                Some(v) => {
                    out.push(std::mem::take(&mut cur));
                    cur.0.push(self.times[i]);
                    cur.1.push(v);
                    last_tick = Some(self.ticks[i]);
                }
                None => {
                    if !cur.0.is_empty() {
                        out.push(std::mem::take(&mut cur));
                    }
                    last_tick = None;
                }
            }
        }
        if !cur.0.is_empty() {
            out.push(cur);
        }
        out
    }

    /// `(raw, smooth)` for every segment long enough to smooth.
    fn smoothed_segments(
        &self,
        value: impl Fn(usize) -> Option<T>,
        p: &AnalysisParams<T>,
    ) -> Result<Vec<(Vec<T>, Vec<T>)>> {
        let mut out = Vec::new();
        for (t, y) in self.segments(value) {
            if y.len() < p.window.max(4) {
                continue;
            }
            let s = smooth_series(&t, &y, p.window, p.lambda)?;
            out.push((y, s));
        }
        Ok(out)
    }

    pub fn distance_stability(&self, p: &AnalysisParams<T>) -> Result<Vec<DistanceBin<T>>> {
        p.validate()?;
        let mut bins: Vec<Vec<T>> = vec![Vec::new(); p.bin_count()];
        for (raw, smooth) in self.smoothed_segments(|i| self.hip_distance[i], p)? {
            let var = local_variability(&raw, &smooth)?;
            for (d, v) in raw.iter().zip(var) {
                if let Some(k) = p.bin_of(*d) {
                    bins[k].push(v);
                }
            }
        }
        Ok(bins
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| {
                let lower = p.bin_min + p.bin_width * T::from_usize_lossy(k);
                DistanceBin {
                    lower,
                    upper: (lower + p.bin_width).min(p.bin_max),
                    max: v.iter().copied().fold(T::zero(), T::max),
                    p95: percentile(&v, T::lit(0.95)).unwrap_or_else(T::zero),
                    samples: v.len(),
                }
            })
            .collect())
    }

    pub fn joint_sd(&self, j: JointId, mode: SdMode, p: &AnalysisParams<T>) -> Result<T> {
        let value = |i: usize| self.joint_distance[i].map(|d| d[j.index()]);
        let series: Vec<T> = match mode {
            SdMode::Raw => (0..self.len()).filter_map(value).collect(),
            SdMode::Residual => self
                .smoothed_segments(value, p)?
                .into_iter()
                .flat_map(|(raw, smooth)| raw.into_iter().zip(smooth).map(|(a, b)| a - b))
                .collect(),
        };
        sample_sd(&series)
    }

    pub fn report(&self, meta: RunMeta, p: &AnalysisParams<T>) -> Result<StabilityReport<T>> {
        p.validate()?;
        let joint_sd = JointId::all()
            .filter(|&j| j != JointId::ANCHOR)
            .filter_map(|j| match self.joint_sd(j, p.sd_mode, p) {
                Ok(sd) => Some(Ok(JointSd { joint: j, sd })),
                Err(Error::SeriesTooShort { .. }) => None,
                Err(e) => Some(Err(e)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StabilityReport {
            meta,
            params: *p,
            frames: self.len(),
            no_detects: self.no_detects()?,
            false_detects: self.false_detects(),
            distance_variability: self.distance_stability(p)?,
            joint_sd,
        })
    }

    pub fn last_hip_distance(&self) -> Option<T> {
        self.hip_distance.last().copied().flatten()
    }

    /// Newest local variability estimate: the sample `window / 2` ticks back
    /// against the centred mean around it.
    pub fn rolling_variability(&self, window: usize) -> Option<T> {
        let n = self.hip_distance.len();
        if window == 0 || n < window {
            return None;
        }
        let tail: Option<Vec<T>> = self.hip_distance[n - window..].iter().copied().collect();
        let tail = tail?;
        let mean = tail.iter().copied().sum::<T>() / T::from_usize_lossy(window);
        Some((tail[window / 2] - mean).abs())
    }
}

/// Frames where the VRU was visible but not reported.
pub fn count_no_detects<T: Scalar>(log: &RunLog<T>) -> Result<u64> {
    SeriesSet::from_frames(&log.frames).no_detects()
}

/// Frames reporting more than one person.
pub fn count_false_detects<T: Scalar>(log: &RunLog<T>) -> u64 {
    SeriesSet::from_frames(&log.frames).false_detects()
}

/// Per-distance-bin local variability of the estimated planar hip distance.
pub fn distance_stability<T: Scalar>(log: &RunLog<T>, params: &AnalysisParams<T>) -> Result<Vec<DistanceBin<T>>> {
    SeriesSet::from_frames(&log.frames).distance_stability(params)
}

/// Temporal SD of joint `j`'s distance to the anchor.
pub fn joint_stability_sd<T: Scalar>(
    log: &RunLog<T>,
    j: JointId,
    mode: SdMode,
    params: &AnalysisParams<T>,
) -> Result<T> {
    SeriesSet::from_frames(&log.frames).joint_sd(j, mode, params)
}

/// Full offline report of a run log.
pub fn analyze<T: Scalar>(log: &RunLog<T>, params: &AnalysisParams<T>) -> Result<StabilityReport<T>> {
    SeriesSet::from_frames(&log.frames).report(log.meta.clone(), params)
}

/// Spearman rank correlation, average ranks for ties.
pub fn spearman<T: Scalar>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: x.len() });
    }
    let rank = |v: &[T]| -> Vec<T> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap_or(std::cmp::Ordering::Equal));
        let mut r = vec![T::zero(); v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut k = i;
            while k + 1 < idx.len() && v[idx[k + 1]] == v[idx[i]] {
                k += 1;
            }
            let avg = T::from_usize_lossy(i + k) / T::lit(2.0) + T::one();
            for &m in &idx[i..=k] {
                r[m] = avg;
            }
            i = k + 1;
        }
        r
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = T::from_usize_lossy(x.len());
    let (mx, my) = (rx.iter().copied().sum::<T>() / n, ry.iter().copied().sum::<T>() / n);
    let cov: T = rx.iter().zip(&ry).map(|(a, b)| (*a - mx) * (*b - my)).sum();
    let vx: T = rx.iter().map(|a| (*a - mx) * (*a - mx)).sum();
    let vy: T = ry.iter().map(|b| (*b - my) * (*b - my)).sum();
    if vx == T::zero() || vy == T::zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(cov / (vx * vy).sqrt())
}
