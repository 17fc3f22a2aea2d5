use serde::{Deserialize, Serialize};

use crate::geom::{Pose2, Vec3};
use crate::scalar::{wrap_angle, Scalar};
use crate::vehicle::VehicleState;

/// Camera mounting on the vehicle. `pitch` is positive when the optical axis
/// tilts down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct CameraMount<T> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub yaw: T,
    pub pitch: T,
    pub roll: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct CameraModel<T> {
    pub width: u32,
    pub height: u32,
    pub fps: T,
    pub horizontal_fov: T,
    pub mount: CameraMount<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Pixel<T> {
    pub u: T,
    pub v: T,
}

impl<T: Scalar> Default for CameraModel<T> {
    /// 1280 x 960 px at 20 fps, pitched 7.6 degrees down, 1.5 m above ground.
    fn default() -> Self {
        Self {
            width: 1280,
            height: 960,
            fps: T::lit(20.0),
            horizontal_fov: T::lit(70.0).to_radians(),
            mount: CameraMount {
                x: T::zero(),
                y: T::zero(),
                z: T::lit(1.5),
                yaw: T::zero(),
                pitch: T::lit(7.6).to_radians(),
                roll: T::zero(),
            },
        }
    }
}

impl<T: Scalar> CameraModel<T> {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.horizontal_fov > T::zero() && self.horizontal_fov < T::PI()) {
            return Err(crate::Error::InvalidParameter("horizontal_fov must be in (0, pi)".into()));
        }
        if self.width == 0 || self.height == 0 {
            return Err(crate::Error::InvalidParameter("camera resolution must be non-zero".into()));
        }
        if !(self.fps > T::zero()) {
            return Err(crate::Error::InvalidParameter("fps must be > 0".into()));
        }
        Ok(())
    }

    /// Focal length in pixels (square pixels).
    pub fn focal_px(&self) -> T {
        T::from_u32(self.width).unwrap() / T::lit(2.0) / (self.horizontal_fov / T::lit(2.0)).tan()
    }

    pub fn vertical_fov(&self) -> T {
        let aspect = T::from_u32(self.height).unwrap() / T::from_u32(self.width).unwrap();
        T::lit(2.0) * ((self.horizontal_fov / T::lit(2.0)).tan() * aspect).atan()
    }

    pub fn principal_point(&self) -> Pixel<T> {
        Pixel { u: T::from_u32(self.width).unwrap() / T::lit(2.0), v: T::from_u32(self.height).unwrap() / T::lit(2.0) }
    }

    pub fn position_in_vehicle(&self) -> Vec3<T> {
        Vec3::new(self.mount.x, self.mount.y, self.mount.z)
    }

    /// Vehicle-frame point to camera coordinates (x right, y down, z along
    /// the optical axis).
    pub fn vehicle_to_camera(&self, p: Vec3<T>) -> Vec3<T> {
        let m = &self.mount;
        let rel = (p - self.position_in_vehicle()).rotate_z(-m.yaw);
        let (sp, cp) = m.pitch.sin_cos();
        // Unrolled axes in (forward, left, up).
        let z_axis = Vec3::new(cp, T::zero(), -sp);
        let x_axis = Vec3::new(T::zero(), -T::one(), T::zero());
        let y_axis = Vec3::new(-sp, T::zero(), -cp);
        let (xc, yc, zc) = (rel.dot(x_axis), rel.dot(y_axis), rel.dot(z_axis));
        let (sr, cr) = m.roll.sin_cos();
        Vec3::new(cr * xc + sr * yc, -sr * xc + cr * yc, zc)
    }

    /// Pinhole projection of a vehicle-frame point; `None` if behind the
    /// image plane or outside the sensor.
    pub fn project_vehicle_point(&self, p: Vec3<T>) -> Option<Pixel<T>> {
        let c = self.vehicle_to_camera(p);
        if !(c.z > T::zero()) {
            return None;
        }
        let f = self.focal_px();
        let pp = self.principal_point();
        let u = pp.u + f * c.x / c.z;
        let v = pp.v + f * c.y / c.z;
        let (w, h) = (T::from_u32(self.width).unwrap(), T::from_u32(self.height).unwrap());
        (u >= T::zero() && u < w && v >= T::zero() && v < h).then_some(Pixel { u, v })
    }

    /// Whether a vehicle-frame point lies ahead of the camera inside the
    /// horizontal field-of-view cone (elevation ignored).
    pub fn in_horizontal_fov(&self, p: Vec3<T>) -> bool {
        let dx = p.x - self.mount.x;
        let dy = p.y - self.mount.y;
        let bearing = wrap_angle(dy.atan2(dx) - self.mount.yaw);
        let ahead = dx * self.mount.yaw.cos() + dy * self.mount.yaw.sin() > T::zero();
        ahead && bearing.abs() <= self.horizontal_fov / T::lit(2.0)
    }

    /// Camera position in the world for a given vehicle pose.
    pub fn world_position(&self, vehicle: &VehicleState<T>) -> Vec3<T> {
        vehicle.pose().to_parent(self.position_in_vehicle())
    }
}

/// Projects a world point seen from `vehicle`.
pub fn project_point<T: Scalar>(camera: &CameraModel<T>, p: Vec3<T>, vehicle: &VehicleState<T>) -> Option<Pixel<T>> {
    let pose: Pose2<T> = vehicle.pose();
    camera.project_vehicle_point(pose.to_local(p))
}
