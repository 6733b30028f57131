use rand::Rng;

use super::swarm::uniform_in_ball;
use super::GenerationConfig;
use crate::camera::CameraSpec;
use crate::rng::{Purpose, StreamKey};
use crate::Vec3;

/// Cameras never go below this altitude, meters.
pub const MIN_CAMERA_ALTITUDE: f64 = 0.5;
/// Look-at jitter radius as a fraction of the camera bound.
pub const LOOK_AT_JITTER: f64 = 0.1;

/// Camera for one frame: position uniform in the cube of half-extent
/// `camera_bound` around the swarm centroid (above [`MIN_CAMERA_ALTITUDE`]),
/// focal length uniform in the configured range, aimed at the centroid plus a
/// jitter uniform in a ball of radius `0.1 · camera_bound`.
pub fn sample_camera(
    master_seed: u64,
    segment_index: u64,
    frame_index: u64,
    config: &GenerationConfig,
    swarm_centroid: Vec3,
) -> CameraSpec {
    sample_camera_attempt(master_seed, segment_index, frame_index, config, swarm_centroid, 0)
}

/// Like [`sample_camera`], drawing from the independent stream of a retry `attempt`.
pub fn sample_camera_attempt(
    master_seed: u64,
    segment_index: u64,
    frame_index: u64,
    config: &GenerationConfig,
    c: Vec3,
    attempt: u64,
) -> CameraSpec {
    let mut rng = StreamKey::new(master_seed, segment_index, frame_index, Purpose::Camera)
        .with_extra(attempt)
        .rng();
    let b = config.camera_bound;
    let z_lo = (c.z - b).max(MIN_CAMERA_ALTITUDE);
    let z_hi = (c.z + b).max(z_lo);
    let position = Vec3::new(
        rng.random_range(c.x - b..=c.x + b),
        rng.random_range(c.y - b..=c.y + b),
        rng.random_range(z_lo..=z_hi),
    );
    let [f_lo, f_hi] = config.focal_range;
    let focal = rng.random_range(f_lo..=f_hi);
    let look_at = c + uniform_in_ball(&mut rng, LOOK_AT_JITTER * b);
    CameraSpec::new(position, look_at, focal, config.image_width, config.image_height)
}
