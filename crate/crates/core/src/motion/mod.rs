//! Ground-truth VRU motion: root paths plus procedural articulation for
//! pedestrians and cyclists. Everything here is a pure function of time and
//! parameters.

mod cyclist;
mod path;
mod pedestrian;

pub use cyclist::{articulate_cyclist_body, cyclist_frame_at, CyclistParams};
pub use path::{path_pose, PathShape, PathSpec};
pub(crate) use pedestrian::pose_gesture_arm;
pub use pedestrian::{
    articulate_pedestrian_body, body_to_world, pedestrian_frame_at, GaitParams, GestureInterval, GestureKind,
};
