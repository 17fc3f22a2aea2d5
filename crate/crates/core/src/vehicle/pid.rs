use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Discrete PID controller state with output clamping and anti-windup.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct PidState<T> {
    pub kp: T,
    pub ki: T,
    pub kd: T,
    #[serde(default)]
    pub integral: T,
    /// `None` until the first update; the derivative term is zero then.
    #[serde(default)]
    pub prev_error: Option<T>,
    pub output_min: T,
    pub output_max: T,
}

impl<T: Scalar> PidState<T> {
    pub fn new(kp: T, ki: T, kd: T, output_min: T, output_max: T) -> Self {
        Self { kp, ki, kd, integral: T::zero(), prev_error: None, output_min, output_max }
    }

    pub fn reset(&self) -> Self {
        Self { integral: T::zero(), prev_error: None, ..*self }
    }

    fn clamp(&self, u: T) -> T {
        u.max(self.output_min).min(self.output_max)
    }
}

/// `u = kp e + ki integral(e) + kd de/dt`, clamped to the output limits.
///
/// The integral only accumulates when doing so does not push an already
/// saturated output further into saturation, and `ki * integral` is itself
/// kept within the output limits.
pub fn pid_step<T: Scalar>(pid: &PidState<T>, error: T, dt: T) -> (T, PidState<T>) {
    let p = pid.kp * error;
    let d = match pid.prev_error {
        Some(prev) if dt > T::zero() => pid.kd * (error - prev) / dt,
        _ => T::zero(),
    };
    let candidate = pid.integral + error * dt;
    let unclamped = p + pid.ki * candidate + d;
    let winding_up =
        (unclamped > pid.output_max && error > T::zero()) || (unclamped < pid.output_min && error < T::zero());
    let mut integral = if winding_up { pid.integral } else { candidate };
    if pid.ki > T::zero() {
        integral = integral.max(pid.output_min / pid.ki).min(pid.output_max / pid.ki);
    }
    let output = pid.clamp(p + pid.ki * integral + d);
    (output, PidState { integral, prev_error: Some(error), ..*pid })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_error_zero_output() {
        let pid = PidState::new(0.8, 0.1, 0.05, 0.0, 5.0);
        assert_eq!(pid_step(&pid, 0.0, 0.05).0, 0.0);
    }

    #[test]
    fn proportional_only() {
        let pid = PidState::new(1.0, 0.0, 0.0, -5.0, 5.0);
        assert_eq!(pid_step(&pid, 2.0, 0.05).0, 2.0);
        assert_eq!(pid_step(&pid, 9.0, 0.05).0, 5.0);
    }

    /// Integral-only controller driven by e = 1 for 2 s at dt = 0.05 against
    /// a rectangle-rule sum computed independently.
    #[test]
    fn integral_ramp() {
        let dt = 0.05;
        let steps = (2.0f64 / dt).round() as usize;
        let oracle: f64 = (0..steps).map(|_| 1.0 * dt).sum();
        let mut pid = PidState::new(0.0, 1.0, 0.0, 0.0, 5.0);
        let mut out = 0.0;
        let mut prev = 0.0;
        for _ in 0..steps {
            let (u, next) = pid_step(&pid, 1.0, dt);
            assert!(u >= prev);
            prev = u;
            out = u;
            pid = next;
        }
        assert!((oracle - 2.0).abs() < 1e-12);
        assert!((out - oracle).abs() < 0.05, "{out}");
    }

    #[test]
    fn anti_windup() {
        let mut pid = PidState::new(0.0, 1.0, 0.0, 0.0, 1.0);
        for _ in 0..200 {
            pid = pid_step(&pid, 1.0, 0.05).1;
        }
        assert!(pid.ki * pid.integral <= 1.0 + 1e-12);
        // Error reversal pulls the output off the limit immediately.
        let (u, _) = pid_step(&pid, -1.0, 0.05);
        assert!(u < 1.0);
    }

    #[test]
    fn derivative_skips_first_sample() {
        let pid = PidState::new(0.0f64, 0.0, 1.0, -100.0, 100.0);
        let (u0, next) = pid_step(&pid, 3.0, 0.05);
        assert_eq!(u0, 0.0);
        let (u1, _) = pid_step(&next, 4.0, 0.05);
        assert!((u1 - 20.0).abs() < 1e-9);
    }
}
