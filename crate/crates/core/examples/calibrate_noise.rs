//! Recomputes the catalog depth-noise coefficients. The printed values are
//! the ones committed in the catalog.

use cpsim::harness::calibrate_depth_noise;
use cpsim::metrics::AnalysisParams;
use cpsim::{Domain, VruKind};

fn main() -> cpsim::Result<()> {
    let params = AnalysisParams::default();
    let jobs = [
        (VruKind::Pedestrian, vec![Domain::Rw, Domain::Cp], 0.16, 0.02),
        (VruKind::Cyclist, vec![Domain::Cp], 0.23, 0.03),
        (VruKind::Cyclist, vec![Domain::Rw], 0.43, 0.05),
    ];
    for (vru, domains, target, tolerance) in jobs {
        let c = calibrate_depth_noise(vru, &domains, 20.0, target, tolerance, &params)?;
        println!("{}", serde_json::to_string(&c)?);
    }
    Ok(())
}
