//! RW-versus-CP joint stability tables.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::domain::{Perspective, VruKind};
use crate::scalar::Scalar;
use crate::skeleton::JointId;
use crate::{Error, Result};

use super::stability::StabilityReport;

/// Which SD goes in the denominator of the relative error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReDenominator {
    /// Divide by the real-world SD.
    #[default]
    Rw,
    /// Divide by the projected SD.
    Cp,
}

impl std::fmt::Display for ReDenominator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Rw => "rw",
            Self::Cp => "cp",
        })
    }
}

impl std::str::FromStr for ReDenominator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rw" => Ok(Self::Rw),
            "cp" => Ok(Self::Cp),
            other => Err(Error::InvalidParameter(format!("unknown RE denominator `{other}` (rw|cp)"))),
        }
    }
}

/// `|sd_rw - sd_cp| / denominator * 100`.
pub fn relative_error<T: Scalar>(sd_rw: T, sd_cp: T, denominator: ReDenominator) -> Result<T> {
    let den = match denominator {
        ReDenominator::Rw => sd_rw,
        ReDenominator::Cp => sd_cp,
    };
    if !(den > T::zero()) {
        return Err(Error::ZeroDenominator);
    }
    Ok((sd_rw - sd_cp).abs() / den * T::lit(100.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ComparisonRow<T> {
    pub joint: JointId,
    pub perspective: Perspective,
    pub sd_rw: T,
    pub sd_cp: T,
    pub re: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ComparisonTable<T> {
    pub vru: VruKind,
    pub perspective: Perspective,
    pub denominator: ReDenominator,
    pub rows: Vec<ComparisonRow<T>>,
}

/// Table rows for the six tracked joints, or all non-anchor joints.
pub fn build_comparison<T: Scalar>(
    rw: &StabilityReport<T>,
    cp: &StabilityReport<T>,
    denominator: ReDenominator,
    all_joints: bool,
) -> Result<ComparisonTable<T>> {
    if rw.meta.vru != cp.meta.vru || rw.meta.perspective != cp.meta.perspective {
        return Err(Error::MismatchedScenarios(format!(
            "{} {} vs {} {}",
            rw.meta.vru, rw.meta.perspective, cp.meta.vru, cp.meta.perspective
        )));
    }
    let joints: Vec<JointId> =
        if all_joints { JointId::all().filter(|&j| j != JointId::ANCHOR).collect() } else { JointId::TRACKED.to_vec() };
    let rows = joints
        .into_iter()
        .map(|j| {
            let missing =
                |which: &str| Error::MismatchedScenarios(format!("joint {} missing from {which} report", j.index()));
            let sd_rw = rw.joint(j).ok_or_else(|| missing("RW"))?;
            let sd_cp = cp.joint(j).ok_or_else(|| missing("CP"))?;
            Ok(ComparisonRow {
                joint: j,
                perspective: rw.meta.perspective,
                sd_rw,
                sd_cp,
                re: relative_error(sd_rw, sd_cp, denominator)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonTable { vru: rw.meta.vru, perspective: rw.meta.perspective, denominator, rows })
}

impl<T: Scalar> ComparisonTable<T> {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("vru,joint,joint_name,perspective,sd_rw_m,sd_cp_m,re_percent,denominator\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                self.vru,
                r.joint.index(),
                r.joint.name(),
                r.perspective,
                r.sd_rw,
                r.sd_cp,
                r.re,
                self.denominator
            );
        }
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} perspective {} (RE denominator {})\n{:>5} {:<16} {:>4} {:>10} {:>10} {:>8}\n",
            self.vru, self.perspective, self.denominator, "joint", "name", "P", "SD_RW[m]", "SD_CP[m]", "RE[%]"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>5} {:<16} {:>4} {:>10.4} {:>10.4} {:>8.1}",
                r.joint.index(),
                r.joint.name(),
                r.perspective,
                r.sd_rw.as_f64(),
                r.sd_cp.as_f64(),
                r.re.as_f64()
            );
        }
        s
    }
}
