//! Batch execution of catalog scenarios with RW/CP pairing.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::metrics::{build_comparison, AnalysisParams, ComparisonTable, ReDenominator, StabilityReport};
use crate::scalar::Scalar;
use crate::{Error, Result};

use super::catalog::{catalog_triple, scenario_from_catalog, twin_id};
use super::runner::{run_scenario_with_report, RunOutput};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PairResult<T> {
    pub rw_id: u32,
    pub cp_id: u32,
    pub table: ComparisonTable<T>,
}

#[derive(Debug, Clone)]
pub struct SuiteOutput<T: Scalar> {
    pub runs: BTreeMap<u32, RunOutput<T>>,
    pub pairs: Vec<PairResult<T>>,
}

impl<T: Scalar> SuiteOutput<T> {
    pub fn report(&self, id: u32) -> Option<&StabilityReport<T>> {
        self.runs.get(&id).map(|r| &r.online_report)
    }
}

/// Runs catalog scenarios (in parallel) and builds a comparison table for
/// every RW/CP twin pair present in `ids`.
pub fn run_suite<T: Scalar>(
    ids: &[u32],
    params: &AnalysisParams<T>,
    denominator: ReDenominator,
    all_joints: bool,
) -> Result<SuiteOutput<T>> {
    let mut unique: Vec<u32> = ids.to_vec();
    unique.sort_unstable();
    unique.dedup();
    let runs = unique
        .par_iter()
        .map(|&id| {
            let cfg = scenario_from_catalog::<T>(id)?;
            Ok((id, run_scenario_with_report(&cfg, params)?))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;

    let mut pairs = Vec::new();
    for &id in &unique {
        let (_, domain, _) = catalog_triple(id)?;
        let twin = twin_id(id)?;
        if domain != Domain::Rw || !runs.contains_key(&twin) {
            continue;
        }
        let table = build_comparison(&runs[&id].online_report, &runs[&twin].online_report, denominator, all_joints)?;
        pairs.push(PairResult { rw_id: id, cp_id: twin, table });
    }
    Ok(SuiteOutput { runs, pairs })
}

/// Parses `"1-12"`, `"1,4"`, `"7-9,12"`.
pub fn parse_id_list(s: &str) -> Result<Vec<u32>> {
    let bad = || Error::InvalidParameter(format!("bad id list `{s}`"));
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    for &id in &out {
        catalog_triple(id)?;
    }
    Ok(out)
}
