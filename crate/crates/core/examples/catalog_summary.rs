//! Prints the headline metrics of every catalog scenario.

use cpsim::harness::{run_suite, CATALOG_IDS};
use cpsim::metrics::{spearman, AnalysisParams, ReDenominator};
use cpsim::skeleton::JointId;

fn main() -> cpsim::Result<()> {
    let ids: Vec<u32> = CATALOG_IDS.collect();
    let out = run_suite::<f64>(&ids, &AnalysisParams::default(), ReDenominator::Rw, false)?;
    for (id, run) in &out.runs {
        let r = &run.online_report;
        let bins = &r.distance_variability;
        let at20 = r.bin_at(20.0).map(|b| (b.max, b.samples));
        let rho = if bins.len() > 2 {
            let x: Vec<f64> = bins.iter().map(|b| b.lower).collect();
            let y: Vec<f64> = bins.iter().map(|b| b.max).collect();
            spearman(&x, &y).ok()
        } else {
            None
        };
        let sd = |j: u8| r.joint(JointId::new(j as usize).unwrap()).unwrap_or(f64::NAN);
        let last = run.log.frames.last().unwrap();
        println!(
            "id {id:>2} {} {} {}: nd {} fd {} bin20 {:?} rho {:?} sd16 {:.4} sd17 {:.4} sd7 {:.4} sd8 {:.4} sd22 {:.4} final gap {:.2} mode {:?}",
            r.meta.vru, r.meta.domain, r.meta.perspective, r.no_detects, r.false_detects, at20, rho,
            sd(16), sd(17), sd(7), sd(8), sd(22), last.hip_distance_truth, last.tff.mode
        );
    }
    for p in &out.pairs {
        print!("{}", p.table.to_text());
    }
    Ok(())
}
