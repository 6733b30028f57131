use std::sync::Arc;

use rand::Rng;

use super::swarm::{offset_trajectory, separated_offsets, swarm_path, SEGMENT_FRAME};
use super::{drone_offsets, segment_drone_count, GenerationConfig, RandomizerError, SceneEntity, Style};
use crate::geometry::{Pose, Quaternion};
use crate::rng::{Purpose, StreamKey, StreamRng};
use crate::scene::{bird_mesh, make_primitive, prop_mesh, Category, PrimitiveKind, PropKind};
use crate::Vec3;

/// Inclusive distractor count range.
pub const DISTRACTOR_COUNT: [usize; 2] = [3, 12];
/// Inclusive bird count range.
pub const BIRD_COUNT: [usize; 2] = [1, 5];
/// Half-extent of the box distractors are scattered in, around the path center.
pub const DISTRACTOR_HALF_EXTENT: f64 = 60.0;
/// Generic primitive size range, meters.
pub const GENERIC_SIZE: [f64; 2] = [1.0, 8.0];
/// Birds fly this far from the swarm path, meters.
pub const BIRD_OFFSET: [f64; 2] = [5.0, 20.0];
/// Frames per bird wing keyframe.
pub const FLAP_HALF_PERIOD: usize = 4;
/// Scale of the wings-folded keyframe.
pub const FLAP_SCALE: f64 = 0.85;

fn random_color(rng: &mut StreamRng) -> [f64; 3] {
    [rng.random(), rng.random(), rng.random()]
}

fn random_rotation(rng: &mut StreamRng) -> Quaternion<f64> {
    let axis = super::swarm::uniform_in_ball(rng, 1.0);
    Quaternion::from_axis_angle(axis, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Non-drone entities of a segment: birds for `drones_birds`, primitives for
/// `generic_distractors`, street props for `realistic_distractors`. Instance
/// ids continue after the segment's drones.
pub fn place_distractors(
    master_seed: u64,
    segment_index: u64,
    style: Style,
    config: &GenerationConfig,
) -> Result<Vec<SceneEntity>, RandomizerError> {
    let first_id = segment_drone_count(master_seed, segment_index, config) as u32 + 1;
    let len = config.segment_length;
    match style {
        Style::DronesOnly | Style::RandomBackgrounds => Err(RandomizerError::StyleMismatch(style)),
        Style::DronesBirds => {
            let mut rng = StreamKey::new(master_seed, segment_index, SEGMENT_FRAME, Purpose::Birds).rng();
            let n = rng.random_range(BIRD_COUNT[0]..=BIRD_COUNT[1]);
            let path = swarm_path(master_seed, segment_index);
            let drones = drone_offsets(master_seed, segment_index, first_id as usize - 1);
            let offsets = separated_offsets(&mut rng, n, BIRD_OFFSET[0], BIRD_OFFSET[1], 2.0, &drones);
            let mesh = Arc::new(bird_mesh());
            Ok(offsets
                .into_iter()
                .enumerate()
                .map(|(i, off)| {
                    let phase = rng.random_range(0..2 * FLAP_HALF_PERIOD);
                    SceneEntity {
                        mesh: mesh.clone(),
                        category: Category::Bird,
                        label: "bird".into(),
                        trajectory: offset_trajectory(&path, off, len, 0.0, |k| {
                            if ((k + phase) / FLAP_HALF_PERIOD).is_multiple_of(2) {
                                1.0
                            } else {
                                FLAP_SCALE
                            }
                        }),
                        instance_id: first_id + i as u32,
                    }
                })
                .collect())
        }
        Style::GenericDistractors | Style::RealisticDistractors => {
            let mut rng = StreamKey::new(master_seed, segment_index, SEGMENT_FRAME, Purpose::Distractors).rng();
            let n = rng.random_range(DISTRACTOR_COUNT[0]..=DISTRACTOR_COUNT[1]);
            let center = swarm_path(master_seed, segment_index).center();
            let h = DISTRACTOR_HALF_EXTENT;
            (0..n)
                .map(|i| {
                    let color = random_color(&mut rng);
                    let x = rng.random_range(center.x - h..=center.x + h);
                    let y = rng.random_range(center.y - h..=center.y + h);
                    let (mesh, label, pose) = if style == Style::GenericDistractors {
                        let kind = PrimitiveKind::ALL[rng.random_range(0..PrimitiveKind::ALL.len())];
                        let size = rng.random_range(GENERIC_SIZE[0]..=GENERIC_SIZE[1]);
                        let z = rng.random_range((center.z - h).max(size)..=center.z + h);
                        let rot = random_rotation(&mut rng);
                        let mesh = make_primitive(kind, size, color)?;
                        (mesh, format!("{kind:?}").to_lowercase(), Pose::new(Vec3::new(x, y, z), rot, 1.0))
                    } else {
                        let kind = PropKind::ALL[rng.random_range(0..PropKind::ALL.len())];
                        let yaw = rng.random_range(0.0..std::f64::consts::TAU);
                        let scale = rng.random_range(0.9..=1.1);
                        let rot = Quaternion::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), yaw);
                        (prop_mesh(kind, color), format!("{kind:?}").to_lowercase(), Pose::new(Vec3::new(x, y, 0.0), rot, scale))
                    };
                    Ok(SceneEntity {
                        mesh: Arc::new(mesh),
                        category: Category::Distractor,
                        label,
                        trajectory: vec![pose; len],
                        instance_id: first_id + i as u32,
                    })
                })
                .collect()
        }
    }
}
