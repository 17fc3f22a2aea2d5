//! Ground-truth VRU root paths: straight line, lane change and circle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Pose2;
use crate::scalar::{wrap_angle, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub enum PathShape<T> {
    Straight {
        length: T,
    },
    /// Longitudinal extent `length`; the lateral shift happens over
    /// `transition_length`, centred on the path.
    LaneChange {
        length: T,
        lateral_offset: T,
        transition_length: T,
    },
    /// Signed `arc`: positive turns left (counter-clockwise).
    Circle {
        radius: T,
        arc: T,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct PathSpec<T> {
    pub shape: PathShape<T>,
    pub origin: Pose2<T>,
}

// 8-point Gauss-Legendre on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];
const GL_PANELS: usize = 8;

/// Quintic smootherstep, zero first and second derivative at both ends.
fn smoother<T: Scalar>(u: T) -> T {
    let u = u.max(T::zero()).min(T::one());
    u * u * u * (u * (u * T::lit(6.0) - T::lit(15.0)) + T::lit(10.0))
}

fn smoother_deriv<T: Scalar>(u: T) -> T {
    if u <= T::zero() || u >= T::one() {
        return T::zero();
    }
    let w = u * (T::one() - u);
    T::lit(30.0) * w * w
}

struct LaneChangeGeom<T> {
    x0: T,
    width: T,
    offset: T,
}

impl<T: Scalar> LaneChangeGeom<T> {
    fn new(length: T, lateral_offset: T, transition_length: T) -> Self {
        Self { x0: (length - transition_length) / T::lit(2.0), width: transition_length, offset: lateral_offset }
    }

    fn y(&self, x: T) -> T {
        self.offset * smoother((x - self.x0) / self.width)
    }

    fn slope(&self, x: T) -> T {
        self.offset / self.width * smoother_deriv((x - self.x0) / self.width)
    }

    fn speed(&self, x: T) -> T {
        let m = self.slope(x);
        (T::one() + m * m).sqrt()
    }

    /// Arclength from the start of the transition to longitudinal position
    /// `x0 + xi`, `0 <= xi <= width`.
    fn transition_arclength(&self, xi: T) -> T {
        if xi <= T::zero() {
            return T::zero();
        }
        let panel = xi / T::from_usize_lossy(GL_PANELS);
        let half = panel / T::lit(2.0);
        let mut acc = T::zero();
        for k in 0..GL_PANELS {
            let mid = self.x0 + panel * T::from_usize_lossy(k) + half;
            for (n, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
                acc = acc + T::lit(w) * self.speed(mid + half * T::lit(*n));
            }
        }
        acc * half
    }

    /// Inverse of `transition_arclength` by safeguarded Newton iteration.
    fn transition_x(&self, s: T) -> T {
        let total = self.transition_arclength(self.width);
        let mut xi = s / total * self.width;
        for _ in 0..30 {
            let f = self.transition_arclength(xi) - s;
            let step = f / self.speed(self.x0 + xi);
            xi = (xi - step).max(T::zero()).min(self.width);
            if step.abs() <= T::epsilon() * (T::one() + self.width) * T::lit(4.0) {
                break;
            }
        }
        xi
    }
}

impl<T: Scalar> PathSpec<T> {
    pub fn straight(length: T, origin: Pose2<T>) -> Self {
        Self { shape: PathShape::Straight { length }, origin }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.to_string()));
        match self.shape {
            PathShape::Straight { length } if !(length > T::zero()) => bad("straight length must be > 0"),
            PathShape::LaneChange { length, transition_length, lateral_offset } => {
                if !(length > T::zero() && transition_length > T::zero()) {
                    bad("lane change lengths must be > 0")
                } else if transition_length >= length {
                    bad("lane change transition_length must be < length")
                } else if !lateral_offset.is_finite() {
                    bad("lane change offset must be finite")
                } else {
                    Ok(())
                }
            }
            PathShape::Circle { radius, arc } if !(radius > T::zero()) || arc == T::zero() || !arc.is_finite() => {
                bad("circle radius must be > 0 and arc non-zero")
            }
            _ => Ok(()),
        }
    }

    /// Total arclength of the path.
    pub fn total_length(&self) -> T {
        match self.shape {
            PathShape::Straight { length } => length,
            PathShape::LaneChange { length, lateral_offset, transition_length } => {
                let g = LaneChangeGeom::new(length, lateral_offset, transition_length);
                length - transition_length + g.transition_arclength(transition_length)
            }
            PathShape::Circle { radius, arc } => radius * arc.abs(),
        }
    }

    /// Pose in path-local coordinates (origin at the start, heading +x).
    fn local_pose(&self, s: T) -> Pose2<T> {
        match self.shape {
            PathShape::Straight { .. } => Pose2::new(s, T::zero(), T::zero()),
            PathShape::LaneChange { length, lateral_offset, transition_length } => {
                let g = LaneChangeGeom::new(length, lateral_offset, transition_length);
                let trans_len = g.transition_arclength(g.width);
                let x = if s <= g.x0 {
                    s
                } else if s <= g.x0 + trans_len {
                    g.x0 + g.transition_x(s - g.x0)
                } else {
                    s - trans_len + g.width
                };
                Pose2::new(x, g.y(x), g.slope(x).atan())
            }
            PathShape::Circle { radius, arc } => {
                let sign = arc.signum();
                let phi = s / radius;
                Pose2::new(radius * phi.sin(), sign * radius * (T::one() - phi.cos()), wrap_angle(sign * phi))
            }
        }
    }

    /// World pose at arclength `s`, heading tangent to the path.
    pub fn pose_at(&self, s: T) -> Result<Pose2<T>> {
        let total = self.total_length();
        let tol = T::epsilon() * T::lit(64.0) * (T::one() + total);
        if !(s >= -tol && s <= total + tol) {
            return Err(Error::OutOfPath { s: s.as_f64(), length: total.as_f64() });
        }
        let s = s.max(T::zero()).min(total);
        Ok(self.origin.compose(&self.local_pose(s)))
    }
}

/// Free-standing form of [`PathSpec::pose_at`].
pub fn path_pose<T: Scalar>(path: &PathSpec<T>, s: T) -> Result<Pose2<T>> {
    path.pose_at(s)
}
