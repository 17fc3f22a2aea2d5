//! Projection stimulation geometry: matching a virtual camera to a projected
//! screen, horizon placement, keystone pre-warp and height alignment checks.
//!
//! Screen-side conventions: the screen is a vertical plane in front of the
//! physical camera, screen coordinates are metres with x right and y up.

use serde::{Deserialize, Serialize};

use crate::perception::CameraModel;
use crate::scalar::Scalar;
use crate::{Error, Result};

pub type Mat3<T> = [[T; 3]; 3];

/// Projector placement relative to the screen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct ProjectorPose<T> {
    pub height: T,
    pub distance: T,
    pub pitch: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Scalar")]
pub struct ProjectionGeometry<T> {
    /// Projected image width on the screen.
    pub width: T,
    pub d_cam: T,
    pub h_cam: T,
    pub d_horizon: T,
    pub camera_pitch: T,
    pub projector: ProjectorPose<T>,
    pub projector_resolution: [u32; 2],
}

impl<T: Scalar> ProjectionGeometry<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.width > T::zero() && self.d_cam > T::zero()) {
            return bad("width and d_cam must be > 0");
        }
        if !(self.d_horizon > self.d_cam) {
            return bad("d_horizon must exceed d_cam");
        }
        if !(self.h_cam >= T::zero()) {
            return bad("h_cam must be >= 0");
        }
        if !(self.projector.distance > T::zero()) {
            return bad("projector distance must be > 0");
        }
        if self.projector_resolution.contains(&0) {
            return bad("projector resolution must be non-zero");
        }
        Ok(())
    }
}

/// Field of view of a camera that sees an image of width `w` at distance
/// `d_cam` edge to edge.
pub fn horizontal_fov<T: Scalar>(w: T, d_cam: T) -> Result<T> {
    if !(w > T::zero() && d_cam > T::zero()) {
        return Err(Error::InvalidParameter(format!("width {w} and distance {d_cam} must be > 0")));
    }
    Ok(T::lit(2.0) * (w / (T::lit(2.0) * d_cam)).atan())
}

/// Vertical field of view implied by the aspect ratio.
pub fn vertical_fov<T: Scalar>(hfov: T, width_px: u32, height_px: u32) -> T {
    let aspect = T::from_u32(height_px).unwrap() / T::from_u32(width_px).unwrap();
    T::lit(2.0) * ((hfov / T::lit(2.0)).tan() * aspect).atan()
}

/// Height on the screen at which the rendered horizon (ground at `d_horizon`)
/// has to appear for a camera at `h_cam`, by similar triangles.
pub fn horizon_height<T: Scalar>(h_cam: T, d_cam: T, d_horizon: T) -> Result<T> {
    if !(d_cam > T::zero() && d_horizon > d_cam) {
        return Err(Error::InvalidParameter(format!("need d_horizon ({d_horizon}) > d_cam ({d_cam}) > 0")));
    }
    Ok(h_cam * (d_horizon - d_cam) / d_horizon)
}

pub fn mat_mul<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = [[T::zero(); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_det<T: Scalar>(m: &Mat3<T>) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn mat_inv<T: Scalar>(m: &Mat3<T>) -> Result<Mat3<T>> {
    let det = mat_det(m);
    if det == T::zero() || !det.is_finite() {
        return Err(Error::InvalidParameter("singular matrix".into()));
    }
    let c = |r0: usize, c0: usize, r1: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [c(1, 1, 2, 2), -c(0, 1, 2, 2), c(0, 1, 1, 2)],
        [-c(1, 0, 2, 2), c(0, 0, 2, 2), -c(0, 0, 1, 2)],
        [c(1, 0, 2, 1), -c(0, 0, 2, 1), c(0, 0, 1, 1)],
    ];
    Ok(adj.map(|row| row.map(|v| v / det)))
}

/// Applies a homography to a 2D point.
pub fn apply_homography<T: Scalar>(h: &Mat3<T>, p: [T; 2]) -> [T; 2] {
    let x = h[0][0] * p[0] + h[0][1] * p[1] + h[0][2];
    let y = h[1][0] * p[0] + h[1][1] * p[1] + h[1][2];
    let w = h[2][0] * p[0] + h[2][1] * p[1] + h[2][2];
    [x / w, y / w]
}

fn diag<T: Scalar>(a: T, b: T, c: T) -> Mat3<T> {
    let z = T::zero();
    [[a, z, z], [z, b, z], [z, z, c]]
}

fn normalize_det<T: Scalar>(h: Mat3<T>) -> Mat3<T> {
    let s = mat_det(&h).cbrt();
    h.map(|row| row.map(|v| v / s))
}

/// Projector pixel intrinsics: pixel (u right, v down) to normalized image
/// coordinates (x right, y up).
fn projector_intrinsics<T: Scalar>(g: &ProjectionGeometry<T>) -> (Mat3<T>, T, T) {
    let [rw, rh] = g.projector_resolution.map(|r| T::from_u32(r).unwrap());
    let half_w = g.width / (T::lit(2.0) * g.projector.distance);
    let half_h = half_w * rh / rw;
    let f = rw / (T::lit(2.0) * half_w);
    let two = T::lit(2.0);
    let k = [[f, T::zero(), rw / two], [T::zero(), -f, rh / two], [T::zero(), T::zero(), T::one()]];
    (k, half_w, half_h)
}

/// Maps normalized projector coordinates to screen metres for a projector
/// whose axis is tilted up by `theta` relative to the screen normal.
pub fn projector_to_screen<T: Scalar>(theta: T, distance: T) -> Mat3<T> {
    let (s, c) = theta.sin_cos();
    let z = T::zero();
    let r = [[T::one(), z, z], [z, c, s], [z, -s, c]];
    mat_mul(&diag(distance, distance, T::one()), &r)
}

/// Pre-warp for projector pixels so that a projector pitched by
/// `projector_pitch_offset` onto a screen tilted by `screen_tilt` draws an
/// undistorted, axis-aligned rectangle with the source aspect ratio. The
/// rectangle is the largest one centred in the keystoned trapezoid.
/// Normalized to unit determinant; identity when both angles are zero.
pub fn keystone_homography<T: Scalar>(
    projector_pitch_offset: T,
    screen_tilt: T,
    g: &ProjectionGeometry<T>,
) -> Result<Mat3<T>> {
    let limit = T::FRAC_PI_4();
    if !(projector_pitch_offset.abs() < limit && screen_tilt.abs() < limit) {
        return Err(Error::InvalidParameter("keystone angles must be below 45 degrees".into()));
    }
    g.validate()?;
    let theta = projector_pitch_offset - screen_tilt;
    let d = g.projector.distance;
    let p = projector_to_screen(theta, d);
    let (k, a, b) = projector_intrinsics(g);

    let corner = |x: T, y: T| apply_homography(&p, [x, y]);
    let (bl, br, tl, tr) = (corner(-a, -b), corner(a, -b), corner(-a, b), corner(a, b));
    let half_narrow = (br[0] - bl[0]).min(tr[0] - tl[0]) / T::lit(2.0);
    let (y_lo, y_hi) = (bl[1].max(br[1]), tl[1].min(tr[1]));
    let half_w = half_narrow.min((y_hi - y_lo) / T::lit(2.0) * a / b);
    let half_h = half_w * b / a;
    let y_mid = (y_lo + y_hi) / T::lit(2.0);
    let target = [[half_w / a, T::zero(), T::zero()], [T::zero(), half_h / b, y_mid], [T::zero(), T::zero(), T::one()]];

    let h_norm = mat_mul(&mat_inv(&p)?, &target);
    let h_px = mat_mul(&mat_mul(&k, &h_norm), &mat_inv(&k)?);
    Ok(normalize_det(h_px))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct VirtualCameraConfig<T> {
    pub hfov: T,
    pub vfov: T,
    pub render_width: u32,
    pub render_height: u32,
    /// Screen height of the rendered horizon.
    pub horizon_height: T,
    pub warnings: Vec<String>,
}

/// Virtual camera settings that make the rendered scene line up with the
/// physical camera's view of the screen.
pub fn virtual_camera_config<T: Scalar>(
    g: &ProjectionGeometry<T>,
    phys: &CameraModel<T>,
) -> Result<VirtualCameraConfig<T>> {
    g.validate()?;
    let hfov = horizontal_fov(g.width, g.d_cam)?;
    let [rw, rh] = g.projector_resolution;
    let mut warnings = Vec::new();
    let max_pitch = T::lit(10.0).to_radians();
    for (name, pitch) in [("geometry camera_pitch", g.camera_pitch), ("physical camera pitch", phys.mount.pitch)] {
        if pitch.abs() > max_pitch {
            warnings.push(format!(
                "{name} {:.2} deg exceeds 10 deg; small-angle horizon shift is inaccurate",
                pitch.to_degrees()
            ));
        }
    }
    if u64::from(rw) * u64::from(phys.height) != u64::from(rh) * u64::from(phys.width) {
        warnings
            .push(format!("projector aspect {rw}x{rh} differs from physical camera {}x{}", phys.width, phys.height));
    }
    Ok(VirtualCameraConfig {
        hfov,
        vfov: vertical_fov(hfov, rw, rh),
        render_width: rw,
        render_height: rh,
        horizon_height: horizon_height(g.h_cam, g.d_cam, g.d_horizon)?,
        warnings,
    })
}

/// Signed percentage by which the CP image height exceeds the RW one.
pub fn alignment_error<T: Scalar>(rw_height_px: T, cp_height_px: T) -> Result<T> {
    if !(rw_height_px > T::zero()) {
        return Err(Error::InvalidParameter("rw height must be > 0".into()));
    }
    Ok((cp_height_px - rw_height_px) / rw_height_px * T::lit(100.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Vec3;
    use proptest::prelude::*;

    fn geometry() -> ProjectionGeometry<f64> {
        ProjectionGeometry {
            width: 2.4,
            d_cam: 2.0,
            h_cam: 1.5,
            d_horizon: 50.0,
            camera_pitch: 7.6f64.to_radians(),
            projector: ProjectorPose { height: 0.5, distance: 2.5, pitch: 0.0 },
            projector_resolution: [1920, 1080],
        }
    }

    #[test]
    fn fov_examples() {
        assert!((horizontal_fov(4.0f64, 2.0).unwrap().to_degrees() - 90.0).abs() < 1e-12);
        assert!(horizontal_fov(1e-12f64, 2.0).unwrap() < 1e-11);
        assert!((horizontal_fov(2.4f64, 2.0).unwrap().to_degrees() - 61.927_513).abs() < 1e-5);
        assert!(horizontal_fov(0.0f64, 2.0).is_err());
        assert!(horizontal_fov(1.0f64, -2.0).is_err());
        assert!((vertical_fov(std::f64::consts::FRAC_PI_2, 100, 100) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn horizon_examples() {
        assert!((horizon_height(1.5f64, 2.0, 50.0).unwrap() - 1.44).abs() < 1e-12);
        assert!(horizon_height(1.5f64, 2.0, 2.0).is_err());
        assert!((horizon_height(1.5f64, 2.0, 1e9).unwrap() - 1.5).abs() < 1e-8);
    }

    #[test]
    fn keystone_identity_and_bounds() {
        let h = keystone_homography(0.0, 0.0, &geometry()).unwrap();
        for (i, row) in h.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((v - e).abs() < 1e-12, "{h:?}");
            }
        }
        assert!(keystone_homography(0.8, 0.0, &geometry()).is_err());
    }

    #[test]
    fn keystone_round_trip() {
        let g = geometry();
        let h = keystone_homography(0.1, -0.05, &g).unwrap();
        assert!((mat_det(&h) - 1.0).abs() < 1e-12);
        let hi = mat_inv(&h).unwrap();
        for c in [[0.0, 0.0], [1920.0, 0.0], [0.0, 1080.0], [1920.0, 1080.0]] {
            let back = apply_homography(&hi, apply_homography(&h, c));
            assert!((back[0] - c[0]).abs() < 1e-9 && (back[1] - c[1]).abs() < 1e-9);
        }
    }

    /// Screen hit of a projector pixel by explicit ray-plane intersection.
    fn cast(g: &ProjectionGeometry<f64>, theta: f64, px: [f64; 2]) -> [f64; 2] {
        let [rw, rh] = g.projector_resolution.map(f64::from);
        let half_w = g.width / (2.0 * g.projector.distance);
        let f = rw / (2.0 * half_w);
        let ray_cam = Vec3::new((px[0] - rw / 2.0) / f, -(px[1] - rh / 2.0) / f, 1.0);
        // tilt the ray up about the horizontal axis
        let (s, c) = theta.sin_cos();
        let ray = Vec3::new(ray_cam.x, c * ray_cam.y + s * ray_cam.z, -s * ray_cam.y + c * ray_cam.z);
        let t = g.projector.distance / ray.z;
        [ray.x * t, ray.y * t]
    }

    #[test]
    fn keystone_corrects_pitch_trapezoid() {
        let g = geometry();
        let theta = 5f64.to_radians();
        let corners = [[0.0, 0.0], [1920.0, 0.0], [1920.0, 1080.0], [0.0, 1080.0]];
        let raw: Vec<_> = corners.iter().map(|&c| cast(&g, theta, c)).collect();
        let top = raw[1][0] - raw[0][0];
        let bottom = raw[2][0] - raw[3][0];
        assert!(top > bottom);

        let h = keystone_homography(theta, 0.0, &g).unwrap();
        let q: Vec<_> = corners.iter().map(|&c| cast(&g, theta, apply_homography(&h, c))).collect();
        let (tl, tr, br, bl) = (q[0], q[1], q[2], q[3]);
        let scale = tr[0] - tl[0];
        assert!(((tr[0] - tl[0]) - (br[0] - bl[0])).abs() / scale < 1e-6);
        assert!((tl[1] - tr[1]).abs() / scale < 1e-6 && (bl[1] - br[1]).abs() / scale < 1e-6);
        assert!((tl[0] - bl[0]).abs() / scale < 1e-6 && (tr[0] - br[0]).abs() / scale < 1e-6);
        // aspect of the source is kept
        assert!(((tr[0] - tl[0]) / (tl[1] - bl[1]) - 1920.0 / 1080.0).abs() < 1e-6);
        // pre-warped pixels stay inside the projector frame
        for c in corners {
            let p = apply_homography(&h, c);
            assert!(p[0] >= -1e-6 && p[0] <= 1920.0 + 1e-6 && p[1] >= -1e-6 && p[1] <= 1080.0 + 1e-6);
        }
    }

    #[test]
    fn virtual_camera_examples() {
        let mut g = geometry();
        g.width = 2.0 * g.d_cam;
        let phys = CameraModel::<f64>::default();
        let v = virtual_camera_config(&g, &phys).unwrap();
        assert!((v.hfov.to_degrees() - 90.0).abs() < 1e-12);
        assert!((v.vfov - vertical_fov(v.hfov, 1920, 1080)).abs() < 1e-15);
        assert_eq!((v.render_width, v.render_height), (1920, 1080));
        assert!(v.warnings.iter().any(|w| w.contains("aspect")));

        let mut doubled = g;
        doubled.width *= 2.0;
        doubled.d_cam *= 2.0;
        assert!((virtual_camera_config(&doubled, &phys).unwrap().hfov - v.hfov).abs() < 1e-12);

        let v = virtual_camera_config(&geometry(), &phys).unwrap();
        assert!((v.hfov.to_degrees() - 61.927_513).abs() < 1e-5);

        let mut steep = phys;
        steep.mount.pitch = 12f64.to_radians();
        assert!(virtual_camera_config(&geometry(), &steep).unwrap().warnings.iter().any(|w| w.contains("10 deg")));
    }

    #[test]
    fn alignment_examples() {
        assert_eq!(alignment_error(500.0f64, 500.0).unwrap(), 0.0);
        assert!((alignment_error(500.0f64, 506.0).unwrap() - 1.2).abs() < 1e-12);
        assert!((alignment_error(500.0f64, 495.0).unwrap() + 1.0).abs() < 1e-12);
        assert!(alignment_error(0.0f64, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn fov_scale_invariant(w in 0.01..100.0f64, d in 0.01..100.0f64, k in 0.001..1000.0f64) {
            let a = horizontal_fov(w, d).unwrap();
            let b = horizontal_fov(k * w, k * d).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn horizon_monotone(h in 0.1..5.0f64, d in 0.1..20.0f64, x in 0.001..1000.0f64, dx in 0.001..1000.0f64) {
            let a = horizon_height(h, d, d + x).unwrap();
            let b = horizon_height(h, d, d + x + dx).unwrap();
            prop_assert!(b > a && b <= h);
        }
    }
}
