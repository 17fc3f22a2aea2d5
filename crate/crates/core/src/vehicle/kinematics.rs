use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Pose2;
use crate::scalar::{wrap_angle, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct VehicleState<T> {
    pub x: T,
    pub y: T,
    pub yaw: T,
    pub v: T,
    pub wheelbase: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct VehicleLimits<T> {
    pub v_max: T,
    pub accel_max: T,
    pub steer_max: T,
}

impl<T: Scalar> Default for VehicleLimits<T> {
    fn default() -> Self {
        Self { v_max: T::lit(5.0), accel_max: T::lit(1.5), steer_max: T::lit(0.5) }
    }
}

impl<T: Scalar> VehicleState<T> {
    pub fn new(x: T, y: T, yaw: T, v: T, wheelbase: T) -> Self {
        Self { x, y, yaw, v, wheelbase }
    }

    pub fn at_rest(pose: Pose2<T>, wheelbase: T) -> Self {
        Self::new(pose.x, pose.y, pose.yaw, T::zero(), wheelbase)
    }

    pub fn pose(&self) -> Pose2<T> {
        Pose2::new(self.x, self.y, self.yaw)
    }

    pub fn validate(&self, limits: &VehicleLimits<T>) -> Result<()> {
        if !(self.wheelbase > T::zero()) {
            return Err(Error::InvalidParameter("wheelbase must be > 0".into()));
        }
        if !(self.v >= T::zero() && self.v <= limits.v_max) {
            return Err(Error::InvalidParameter("vehicle speed must be in [0, v_max]".into()));
        }
        Ok(())
    }
}

/// One kinematic bicycle step (rear-axle reference, explicit Euler).
///
/// Steering is clamped to `steer_max`, the commanded speed to `[0, v_max]`,
/// and speed moves towards the command at most `accel_max * dt` per step.
pub fn step_vehicle<T: Scalar>(
    state: &VehicleState<T>,
    steer: T,
    v_cmd: T,
    dt: T,
    limits: &VehicleLimits<T>,
) -> Result<VehicleState<T>> {
    if !(dt > T::zero() && dt <= T::lit(0.1)) {
        return Err(Error::BadTimeStep(dt.as_f64()));
    }
    let steer = steer.max(-limits.steer_max).min(limits.steer_max);
    let v = state.v;
    let x = state.x + v * state.yaw.cos() * dt;
    let y = state.y + v * state.yaw.sin() * dt;
    let yaw = wrap_angle(state.yaw + v * steer.tan() / state.wheelbase * dt);
    let target = v_cmd.max(T::zero()).min(limits.v_max);
    let dv_max = limits.accel_max * dt;
    let v_next = v + (target - v).max(-dv_max).min(dv_max);
    Ok(VehicleState { x, y, yaw, v: v_next, wheelbase: state.wheelbase })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn straight_translation() {
        let s = VehicleState::new(0.0f64, 0.0, 0.0, 2.0, 2.8);
        let n = step_vehicle(&s, 0.0, 2.0, 0.05, &VehicleLimits::default()).unwrap();
        assert!((n.x - 0.1).abs() < 1e-12 && n.y == 0.0 && n.yaw == 0.0 && n.v == 2.0);
    }

    #[test]
    fn bad_dt() {
        let s = VehicleState::new(0.0, 0.0, 0.0, 2.0, 2.8);
        for dt in [0.0, -0.01, 0.2] {
            assert!(matches!(step_vehicle(&s, 0.0, 2.0, dt, &VehicleLimits::default()), Err(Error::BadTimeStep(_))));
        }
    }

    #[test]
    fn braking_is_monotone() {
        let mut s = VehicleState::new(0.0, 0.0, 0.0, 2.0, 2.8);
        let mut prev = s.v;
        for _ in 0..60 {
            s = step_vehicle(&s, 0.0, 0.0, 0.05, &VehicleLimits::default()).unwrap();
            assert!(s.v <= prev && s.v >= 0.0);
            prev = s.v;
        }
        assert_eq!(s.v, 0.0);
    }

    fn circumradius(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
        let ab = (a.0 - b.0).hypot(a.1 - b.1);
        let bc = (b.0 - c.0).hypot(b.1 - c.1);
        let ca = (c.0 - a.0).hypot(c.1 - a.1);
        let area2 = ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).abs();
        ab * bc * ca / (2.0 * area2)
    }

    #[test]
    fn constant_steer_circle() {
        let limits = VehicleLimits::default();
        for delta in [0.1f64, 0.25, -0.4] {
            let mut s = VehicleState::new(0.0, 0.0, 0.0, 2.0, 2.8);
            let mut pts = vec![];
            for _ in 0..600 {
                pts.push((s.x, s.y));
                s = step_vehicle(&s, delta, 2.0, 0.05, &limits).unwrap();
            }
            let r = circumradius(pts[0], pts[100], pts[250]);
            let expect = 2.8 / delta.tan().abs();
            assert!((r - expect).abs() / expect < 0.01, "delta {delta}: {r} vs {expect}");
        }
    }

    proptest! {
        #[test]
        fn yaw_stays_normalized(yaw in -3.1..3.1f64, steer in -0.5..0.5f64, v in 0.0..5.0f64, steps in 1usize..400) {
            let mut s = VehicleState::new(0.0, 0.0, yaw, v, 2.8);
            for _ in 0..steps {
                s = step_vehicle(&s, steer, v, 0.05, &VehicleLimits::default()).unwrap();
                prop_assert!(s.yaw > -std::f64::consts::PI && s.yaw <= std::f64::consts::PI);
            }
        }
    }
}
