//! One-off calibration of the quadratic depth-noise coefficient against a
//! target local variability at a reference distance.

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Perspective, VruKind};
use crate::metrics::AnalysisParams;
use crate::{Error, Result};

use super::catalog::{catalog_id, scenario_from_catalog};
use super::runner::run_scenario_with_report;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseCalibration {
    pub vru: VruKind,
    pub domains: Vec<Domain>,
    pub reference_distance: f64,
    pub target: f64,
    pub depth_sigma_b: f64,
    /// Achieved bin maximum per domain.
    pub achieved: Vec<(Domain, f64)>,
}

/// Bin maximum at `distance` of the straight catalog run for `(vru, domain)`
/// with the depth coefficient replaced by `b`.
pub fn straight_run_variability(
    vru: VruKind,
    domain: Domain,
    b: f64,
    distance: f64,
    params: &AnalysisParams<f64>,
) -> Result<f64> {
    let mut cfg = scenario_from_catalog::<f64>(catalog_id(vru, domain, Perspective::S))?;
    cfg.noise.depth_sigma_b = b;
    let out = run_scenario_with_report(&cfg, params)?;
    out.online_report
        .bin_at(distance)
        .map(|bin| bin.max)
        .ok_or_else(|| Error::InvalidParameter(format!("no samples in the {distance} m bin")))
}

/// Chooses `b` so that the mean bin maximum at `distance` over `domains`
/// is close to `target`.
///
/// The bin maximum is piecewise linear in `b` with jumps wherever a large
/// residual enters or leaves the bin, so a root search can land on a jump.
/// Instead `b` is scanned on a grid and the best point is taken among those
/// whose two neighbours on either side (about +-5 %) also stay within
/// `tolerance` of the target.
pub fn calibrate_depth_noise(
    vru: VruKind,
    domains: &[Domain],
    distance: f64,
    target: f64,
    tolerance: f64,
    params: &AnalysisParams<f64>,
) -> Result<NoiseCalibration> {
    if domains.is_empty() {
        return Err(Error::InvalidParameter("no domains to calibrate".into()));
    }
    let mean_at = |b: f64| -> Result<f64> {
        let mut s = 0.0;
        for &d in domains {
            s += straight_run_variability(vru, d, b, distance, params)?;
        }
        Ok(s / domains.len() as f64)
    };
    let mut hi = 1e-4;
    while mean_at(hi)? < target {
        hi *= 2.0;
        if hi > 1.0 {
            return Err(Error::InvalidParameter("target variability unreachable".into()));
        }
    }
    const N: usize = 100;
    let grid: Vec<f64> = (1..=N).map(|k| hi * k as f64 / N as f64).collect();
    let values = grid.iter().map(|&b| mean_at(b)).collect::<Result<Vec<_>>>()?;
    let err = |k: usize| (values[k] - target).abs();
    let stable = |k: usize| k >= 2 && k + 2 < N && (k - 2..=k + 2).all(|i| err(i) <= tolerance);
    let best = (0..N)
        .filter(|&k| stable(k))
        .min_by(|&a, &b| err(a).total_cmp(&err(b)))
        .or_else(|| (0..N).min_by(|&a, &b| err(a).total_cmp(&err(b))))
        .expect("non-empty grid");
    let b = grid[best];
    let achieved = domains
        .iter()
        .map(|&d| Ok((d, straight_run_variability(vru, d, b, distance, params)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NoiseCalibration {
        vru,
        domains: domains.to_vec(),
        reference_distance: distance,
        target,
        depth_sigma_b: b,
        achieved,
    })
}
