use rand::Rng;

use crate::geometry::{Pose, Quaternion};
use crate::rng::{Purpose, StreamKey, StreamRng};
use crate::Vec3;

/// Flight box the swarm path stays inside (100 m on each side).
pub const FLIGHT_BOX_MIN: Vec3 = Vec3::new(-50.0, -50.0, 5.0);
pub const FLIGHT_BOX_MAX: Vec3 = Vec3::new(50.0, 50.0, 105.0);

/// Minimum distance between any two drone formation offsets, meters.
pub const MIN_DRONE_SEPARATION: f64 = 1.5;
/// Radius of the ball drone offsets are drawn from.
pub const FORMATION_RADIUS: f64 = 6.0;
/// Forward tilt of flying drones, radians.
pub const DRONE_PITCH: f64 = 0.12;

/// Frame used for segment-level substreams.
pub(crate) const SEGMENT_FRAME: u64 = u64::MAX;

/// Cubic Bezier from a start to an end point with two interior control points,
/// all drawn inside the flight box (so the whole curve stays inside it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwarmPath {
    pub control: [Vec3; 4],
}

impl SwarmPath {
    pub fn point(&self, t: f64) -> Vec3 {
        let [p0, p1, p2, p3] = self.control;
        let u = 1.0 - t;
        p0 * (u * u * u) + p1 * (3.0 * u * u * t) + p2 * (3.0 * u * t * t) + p3 * (t * t * t)
    }

    pub fn tangent(&self, t: f64) -> Vec3 {
        let [p0, p1, p2, p3] = self.control;
        let u = 1.0 - t;
        (p1 - p0) * (3.0 * u * u) + (p2 - p1) * (6.0 * u * t) + (p3 - p2) * (3.0 * t * t)
    }

    /// Path parameter of frame `k` in a segment of `len` frames.
    pub fn param(k: usize, len: usize) -> f64 {
        if len <= 1 {
            0.0
        } else {
            k as f64 / (len - 1) as f64
        }
    }

    /// Axis-aligned center of the control polygon.
    pub fn center(&self) -> Vec3 {
        let lo = self.control.iter().fold(Vec3::splat(f64::INFINITY), |a, &b| a.component_min(b));
        let hi = self.control.iter().fold(Vec3::splat(f64::NEG_INFINITY), |a, &b| a.component_max(b));
        (lo + hi) * 0.5
    }
}

fn uniform_in_box(rng: &mut StreamRng, lo: Vec3, hi: Vec3) -> Vec3 {
    Vec3::new(
        rng.random_range(lo.x..=hi.x),
        rng.random_range(lo.y..=hi.y),
        rng.random_range(lo.z..=hi.z),
    )
}

pub(crate) fn uniform_in_ball(rng: &mut StreamRng, radius: f64) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        if v.norm_squared() <= 1.0 {
            return v * radius;
        }
    }
}

pub fn swarm_path(master_seed: u64, segment_index: u64) -> SwarmPath {
    let mut rng = StreamKey::new(master_seed, segment_index, SEGMENT_FRAME, Purpose::SwarmPath).rng();
    SwarmPath {
        control: std::array::from_fn(|_| uniform_in_box(&mut rng, FLIGHT_BOX_MIN, FLIGHT_BOX_MAX)),
    }
}

/// Draws `n` offsets with radius in `[r_min, r_max]`, pairwise at least
/// `min_sep` apart and at least `min_sep` from every point in `avoid`.
pub(crate) fn separated_offsets(
    rng: &mut StreamRng,
    n: usize,
    r_min: f64,
    r_max: f64,
    min_sep: f64,
    avoid: &[Vec3],
) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(n);
    let far_enough = |p: Vec3, others: &[Vec3]| others.iter().all(|o| (*o - p).norm() >= min_sep);
    while out.len() < n {
        let mut placed = false;
        for _ in 0..2000 {
            let p = uniform_in_ball(rng, r_max);
            if p.norm() >= r_min && far_enough(p, &out) && far_enough(p, avoid) {
                out.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            // Crowded ball: stack further offsets on a line outside it.
            let k = out.len() as f64;
            out.push(Vec3::new(r_max + min_sep * (k + 1.0), 0.0, 0.0));
        }
    }
    out
}

pub(crate) fn heading_rotation(tangent: Vec3, pitch: f64) -> Quaternion<f64> {
    let yaw = if tangent.x == 0.0 && tangent.y == 0.0 {
        0.0
    } else {
        tangent.y.atan2(tangent.x)
    };
    Quaternion::from_yaw_pitch(yaw, pitch)
}

/// Formation offsets of the drones in a segment.
pub fn drone_offsets(master_seed: u64, segment_index: u64, n_drones: usize) -> Vec<Vec3> {
    let mut rng = StreamKey::new(master_seed, segment_index, SEGMENT_FRAME, Purpose::SwarmOffsets).rng();
    separated_offsets(&mut rng, n_drones, 0.0, FORMATION_RADIUS, MIN_DRONE_SEPARATION, &[])
}

/// Trajectory following `path` at a constant offset, headed along the path.
pub(crate) fn offset_trajectory(
    path: &SwarmPath,
    offset: Vec3,
    segment_length: usize,
    pitch: f64,
    scale_at: impl Fn(usize) -> f64,
) -> Vec<crate::Pose> {
    (0..segment_length)
        .map(|k| {
            let t = SwarmPath::param(k, segment_length);
            Pose::new(path.point(t) + offset, heading_rotation(path.tangent(t), pitch), scale_at(k))
        })
        .collect()
}

/// Per-drone trajectories: the swarm path shifted by fixed formation offsets.
/// Deterministic in `(master_seed, segment_index)`.
pub fn generate_swarm_path(
    master_seed: u64,
    segment_index: u64,
    n_drones: usize,
    segment_length: usize,
) -> Vec<Vec<crate::Pose>> {
    let path = swarm_path(master_seed, segment_index);
    drone_offsets(master_seed, segment_index, n_drones)
        .into_iter()
        .map(|off| offset_trajectory(&path, off, segment_length, DRONE_PITCH, |_| 1.0))
        .collect()
}

/// Mean of the drones' positions at one frame.
pub fn swarm_centroid(trajectories: &[Vec<crate::Pose>], frame_in_segment: usize) -> Vec3 {
    let sum = trajectories
        .iter()
        .fold(Vec3::zero(), |acc, t| acc + t[frame_in_segment].translation);
    sum / trajectories.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trajectories_have_segment_length() {
        for len in [1, 2, 300] {
            let t = generate_swarm_path(1, 0, 3, len);
            assert_eq!(t.len(), 3);
            assert!(t.iter().all(|p| p.len() == len));
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(generate_swarm_path(9, 4, 5, 300), generate_swarm_path(9, 4, 5, 300));
        assert_ne!(generate_swarm_path(9, 4, 5, 300), generate_swarm_path(9, 5, 5, 300));
    }

    /// Brute force over all frames and pairs.
    #[test]
    fn drones_never_closer_than_half_a_meter() {
        for seed in 0..20 {
            let t = generate_swarm_path(seed, seed * 3, 3, 300);
            for k in 0..300 {
                for i in 0..3 {
                    for j in i + 1..3 {
                        let d = (t[i][k].translation - t[j][k].translation).norm();
                        assert!(d >= 0.5, "seed {seed} frame {k}: {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn path_stays_in_flight_box() {
        for seg in 0..10 {
            let p = swarm_path(3, seg);
            for k in 0..=100 {
                let q = p.point(k as f64 / 100.0);
                let lo = FLIGHT_BOX_MIN - Vec3::splat(1e-9);
                let hi = FLIGHT_BOX_MAX + Vec3::splat(1e-9);
                assert!(q.component_max(lo) == q && q.component_min(hi) == q);
            }
        }
    }

    #[test]
    fn poses_are_valid() {
        for traj in generate_swarm_path(2, 1, 4, 50) {
            assert!(traj.iter().all(|p| p.is_valid()));
        }
    }
}
