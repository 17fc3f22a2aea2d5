mod common;

use common::{brute_force_joint_sd, dense_spline};
use cpsim::harness::{run_scenario, scenario_from_catalog};
use cpsim::metrics::{joint_stability_sd, moving_mean, spline_smooth, AnalysisParams, SdMode};
use cpsim::skeleton::JointId;
use proptest::prelude::*;

fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}

#[test]
fn spline_matches_dense_oracle_on_uniform_grid() {
    let t: Vec<f64> = (0..40).map(|i| i as f64 * 0.05).collect();
    let y: Vec<f64> = t.iter().map(|&x| (3.0 * x).sin() + 0.1 * (17.0 * x).cos()).collect();
    for lambda in [0.01, 1.0, 100.0] {
        let fast = spline_smooth(&t, &y, lambda).unwrap();
        let dense = dense_spline(&t, &y, lambda);
        assert!(rel_err(&fast, &dense) < 1e-8, "lambda {lambda}: {}", rel_err(&fast, &dense));
    }
}

proptest! {
    #[test]
    fn spline_matches_dense_oracle(
        gaps in prop::collection::vec(0.02f64..0.5, 3..50),
        seed in prop::collection::vec(-5.0f64..5.0, 50),
        li in 0usize..3,
    ) {
        let lambda = [0.01, 1.0, 100.0][li];
        let mut t = vec![0.0];
        for g in &gaps {
            t.push(t.last().unwrap() + g);
        }
        let y = &seed[..t.len()];
        let fast = spline_smooth(&t, y, lambda).unwrap();
        let dense = dense_spline(&t, y, lambda);
        prop_assert!(rel_err(&fast, &dense) < 1e-8, "{}", rel_err(&fast, &dense));
    }

    #[test]
    fn moving_mean_matches_direct_average(
        x in prop::collection::vec(-100.0f64..100.0, 17..80),
        half in 0usize..8,
    ) {
        let w = 2 * half + 1;
        let m = moving_mean(&x, w).unwrap();
        for (i, v) in m.iter().enumerate() {
            let k = half.min(i).min(x.len() - 1 - i);
            let direct = x[i - k..=i + k].iter().sum::<f64>() / (2 * k + 1) as f64;
            prop_assert!((v - direct).abs() <= 1e-9 * (1.0 + direct.abs()));
        }
    }
}

#[test]
fn raw_joint_sd_matches_brute_force() {
    let params = AnalysisParams::default();
    for id in [1, 5, 9, 12] {
        let log = run_scenario(&scenario_from_catalog::<f64>(id).unwrap()).unwrap();
        for j in JointId::TRACKED {
            let got = joint_stability_sd(&log, j, SdMode::Raw, &params).unwrap();
            let oracle = brute_force_joint_sd(&log, j);
            assert!((got - oracle).abs() <= 1e-12 * oracle.max(1e-3), "id {id} joint {}: {got} vs {oracle}", j.index());
        }
    }
}
