//! Render -> screen -> physical camera chain for a projected VRU.

use cpsim::geom::Vec3;
use cpsim::perception::CameraModel;
use cpsim::stimulation::{alignment_error, horizon_height, virtual_camera_config, ProjectionGeometry, ProjectorPose};

fn geometry() -> ProjectionGeometry<f64> {
    ProjectionGeometry {
        width: 4.0,
        d_cam: 2.0,
        h_cam: 1.5,
        d_horizon: 200.0,
        camera_pitch: 7.6f64.to_radians(),
        projector: ProjectorPose { height: 2.5, distance: 3.0, pitch: 0.0 },
        projector_resolution: [1280, 960],
    }
}

/// Level virtual camera at the physical eye point; returns the render pixel
/// of a world point (x forward, y left, z up), rounded to the pixel grid.
fn render(g: &ProjectionGeometry<f64>, hfov: f64, p: Vec3<f64>) -> (f64, f64) {
    let [rw, rh] = g.projector_resolution.map(f64::from);
    let f = rw / 2.0 / (hfov / 2.0).tan();
    let u = rw / 2.0 - f * p.y / p.x;
    let v = rh / 2.0 - f * (p.z - g.h_cam) / p.x;
    (u.round() + 0.5, v.round() + 0.5)
}

/// Render pixel to the point it lights on the screen plane.
fn to_screen(g: &ProjectionGeometry<f64>, (u, v): (f64, f64)) -> Vec3<f64> {
    let [rw, rh] = g.projector_resolution.map(f64::from);
    let px = g.width / rw;
    Vec3::new(g.d_cam, -(u - rw / 2.0) * px, g.h_cam - (v - rh / 2.0) * px)
}

#[test]
fn figure_at_ten_metres_matches_direct_view() {
    let g = geometry();
    let phys = CameraModel::<f64>::default();
    let vc = virtual_camera_config(&g, &phys).unwrap();
    assert!(vc.warnings.is_empty(), "{:?}", vc.warnings);

    let feet = Vec3::new(10.0, 0.3, 0.0);
    let head = Vec3::new(10.0, 0.3, 1.8);
    let direct = |p| phys.project_vehicle_point(p).unwrap();
    let via_screen = |p| phys.project_vehicle_point(to_screen(&g, render(&g, vc.hfov, p))).unwrap();

    let rw_px = direct(feet).v - direct(head).v;
    let cp_px = via_screen(feet).v - via_screen(head).v;
    let err = alignment_error(rw_px, cp_px).unwrap();
    assert!(err.abs() < 1.5, "{err}% ({rw_px} vs {cp_px} px)");
}

#[test]
fn rendered_horizon_lands_at_predicted_height() {
    let g = geometry();
    let vc = virtual_camera_config(&g, &CameraModel::default()).unwrap();
    let ground = Vec3::new(g.d_horizon, 0.0, 0.0);
    let [rw, rh] = g.projector_resolution.map(f64::from);
    let f = rw / 2.0 / (vc.hfov / 2.0).tan();
    let v = rh / 2.0 - f * (ground.z - g.h_cam) / ground.x;
    let y = to_screen(&g, (rw / 2.0, v)).z;
    let expected = horizon_height(g.h_cam, g.d_cam, g.d_horizon).unwrap();
    assert!((y - expected).abs() < 1e-12, "{y} vs {expected}");
    assert_eq!(vc.horizon_height, expected);
}

#[test]
fn steep_physical_pitch_warns() {
    let g = geometry();
    let mut phys = CameraModel::<f64>::default();
    phys.mount.pitch = 15f64.to_radians();
    phys.width = 1920;
    phys.height = 1080;
    let vc = virtual_camera_config(&g, &phys).unwrap();
    assert_eq!(vc.warnings.len(), 2, "{:?}", vc.warnings);
}
