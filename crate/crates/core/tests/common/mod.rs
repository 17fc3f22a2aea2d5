//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use cpsim::harness::RunLog;
use cpsim::perception::DetectionSource;
use cpsim::skeleton::JointId;
use nalgebra::{DMatrix, DVector};

/// Penalized least squares over C1 piecewise cubics in Hermite form
/// (knot values and slopes), solved densely. The minimiser over that space
/// is the natural cubic smoothing spline. `g''` is linear on each interval,
/// so two-point Gauss quadrature integrates `g''^2` exactly.
pub fn dense_spline(t: &[f64], y: &[f64], lambda: f64) -> Vec<f64> {
    let n = t.len();
    let dim = 2 * n;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);
    for i in 0..n {
        a[(i, i)] += 1.0;
        rhs[i] = y[i];
    }
    let g = 0.5 / 3f64.sqrt();
    for i in 0..n - 1 {
        let h = t[i + 1] - t[i];
        for tau in [0.5 - g, 0.5 + g] {
            // d2/dx2 of the four Hermite basis functions, unknowns g_i, g_i+1, s_i, s_i+1.
            let idx = [i, i + 1, n + i, n + i + 1];
            let b = [
                (12.0 * tau - 6.0) / (h * h),
                (6.0 - 12.0 * tau) / (h * h),
                (6.0 * tau - 4.0) / h,
                (6.0 * tau - 2.0) / h,
            ];
            let w = lambda * h / 2.0;
            for (p, &ip) in idx.iter().enumerate() {
                for (q, &iq) in idx.iter().enumerate() {
                    a[(ip, iq)] += w * b[p] * b[q];
                }
            }
        }
    }
    let z = a.full_piv_lu().solve(&rhs).expect("oracle system is regular");
    z.as_slice()[..n].to_vec()
}

/// Two-pass sample SD of the true detection's joint-to-pelvis distance,
/// computed straight from the logged joint coordinates.
pub fn brute_force_joint_sd(log: &RunLog<f64>, j: JointId) -> f64 {
    let mut xs = Vec::new();
    for f in &log.frames {
        let Some(d) = f.detections.iter().find(|d| d.source == DetectionSource::TrueVru) else { continue };
        let a = d.skeleton.joints[0];
        let p = d.skeleton.joints[j.index()];
        xs.push(((p.x - a.x).powi(2) + (p.y - a.y).powi(2) + (p.z - a.z).powi(2)).sqrt());
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Reference joint SD pairs (cm) and relative errors (%) for the tracked
/// joints: `(vru, joint, perspective, sd_rw, sd_cp, re)`.
pub const REFERENCE_JOINT_SD: [(&str, u8, char, f64, f64, f64); 36] = [
    ("pedestrian", 22, 'S', 1.55, 2.38, 53.4),
    ("pedestrian", 22, 'D', 1.32, 2.15, 63.1),
    ("pedestrian", 22, 'C', 2.05, 2.87, 39.8),
    ("pedestrian", 23, 'S', 1.56, 2.44, 56.5),
    ("pedestrian", 23, 'D', 1.29, 1.37, 6.5),
    ("pedestrian", 23, 'C', 1.33, 2.26, 70.1),
    ("pedestrian", 7, 'S', 2.54, 1.95, 23.4),
    ("pedestrian", 7, 'D', 2.15, 1.61, 25.1),
    ("pedestrian", 7, 'C', 2.28, 1.73, 24.3),
    ("pedestrian", 8, 'S', 2.32, 2.12, 8.6),
    ("pedestrian", 8, 'D', 2.87, 1.9, 33.9),
    ("pedestrian", 8, 'C', 3.01, 2.15, 28.5),
    ("pedestrian", 16, 'S', 0.44, 0.89, 103.5),
    ("pedestrian", 16, 'D', 0.49, 0.38, 21.8),
    ("pedestrian", 16, 'C', 0.38, 0.55, 44.1),
    ("pedestrian", 17, 'S', 0.36, 0.67, 86.6),
    ("pedestrian", 17, 'D', 0.58, 0.39, 33.0),
    ("pedestrian", 17, 'C', 0.39, 0.63, 60.5),
    ("cyclist", 22, 'S', 1.75, 0.65, 62.9),
    ("cyclist", 22, 'D', 2.2, 1.29, 41.5),
    ("cyclist", 22, 'C', 1.21, 2.10, 73.2),
    ("cyclist", 23, 'S', 1.63, 0.76, 53.0),
    ("cyclist", 23, 'D', 2.64, 1.16, 56.1),
    ("cyclist", 23, 'C', 1.3, 1.43, 10.4),
    ("cyclist", 7, 'S', 3.79, 3.3, 13.0),
    ("cyclist", 7, 'D', 3.82, 3.26, 14.6),
    ("cyclist", 7, 'C', 4.84, 2.96, 38.9),
    ("cyclist", 8, 'S', 3.76, 3.93, 4.3),
    ("cyclist", 8, 'D', 3.54, 2.16, 38.9),
    ("cyclist", 8, 'C', 3.95, 1.81, 54.2),
    ("cyclist", 16, 'S', 0.55, 0.35, 36.7),
    ("cyclist", 16, 'D', 0.85, 0.39, 53.9),
    ("cyclist", 16, 'C', 0.38, 0.47, 23.6),
    ("cyclist", 17, 'S', 0.46, 0.32, 30.7),
    ("cyclist", 17, 'D', 0.94, 0.33, 64.9),
    ("cyclist", 17, 'C', 1.02, 0.38, 62.6),
];
