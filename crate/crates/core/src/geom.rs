//! Small fixed-size vector and rigid-pose types.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::{wrap_angle, Scalar};

/// A 3D point or vector. Serializes as `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[T; 3]", into = "[T; 3]")]
#[serde(bound = "T: Scalar")]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T> From<[T; 3]> for Vec3<T> {
    fn from([x, y, z]: [T; 3]) -> Self {
        Self { x, y, z }
    }
}

impl<T> From<Vec3<T>> for [T; 3] {
    fn from(v: Vec3<T>) -> Self {
        [v.x, v.y, v.z]
    }
}

impl<T: Scalar> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn planar_norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Rotation about the +z axis.
    pub fn rotate_z(self, yaw: T) -> Self {
        let (s, c) = yaw.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }

    pub fn cast<U: Scalar>(self) -> Vec3<U> {
        Vec3::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()), U::lit(self.z.as_f64()))
    }
}

impl<T: Scalar> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }
}

impl<T: Scalar> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Planar rigid pose: position in the plane and heading about +z.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Pose2<T> {
    pub x: T,
    pub y: T,
    pub yaw: T,
}

impl<T: Scalar> Pose2<T> {
    pub fn new(x: T, y: T, yaw: T) -> Self {
        Self { x, y, yaw }
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    /// Maps a point expressed in this pose's local frame into the parent frame.
    pub fn to_parent(&self, p: Vec3<T>) -> Vec3<T> {
        p.rotate_z(self.yaw) + Vec3::new(self.x, self.y, T::zero())
    }

    /// Maps a parent-frame point into this pose's local frame.
    pub fn to_local(&self, p: Vec3<T>) -> Vec3<T> {
        (p - Vec3::new(self.x, self.y, T::zero())).rotate_z(-self.yaw)
    }

    /// Composition `self * local`, i.e. `local` expressed in the parent frame.
    pub fn compose(&self, local: &Pose2<T>) -> Pose2<T> {
        let p = self.to_parent(Vec3::new(local.x, local.y, T::zero()));
        Pose2::new(p.x, p.y, wrap_angle(self.yaw + local.yaw))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec3_serializes_as_array() {
        let v = Vec3::new(1.0, 2.5, -3.0);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "[1.0,2.5,-3.0]");
        let back: Vec3<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn pose_round_trip() {
        let pose = Pose2::new(1.0, -2.0, 0.7);
        let p = Vec3::new(3.0, 4.0, 5.0);
        let q = pose.to_parent(pose.to_local(p));
        assert!((q - p).norm() < 1e-12);
    }
}
