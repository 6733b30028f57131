//! Structured domain randomization: turns `(config, master_seed, frame index)`
//! into a fully resolved [`SceneFrame`].
//!
//! Frames are grouped into segments of `segment_length` frames. Within a
//! segment the swarm path, drone models, extra entities and environment are
//! fixed; the camera (position and focal length) is re-drawn every frame.
//! All randomness comes from keyed substreams (see [`crate::rng`]), so any
//! frame can be built on its own, in any order, on any thread.

mod background;
mod camera;
mod config;
mod distractors;
mod environment;
mod swarm;

use std::sync::Arc;

use image::RgbImage;
use rand::Rng;
use serde::Serialize;

pub use background::{synthesize_random_background, BlendMode};
pub use camera::{sample_camera, sample_camera_attempt, LOOK_AT_JITTER, MIN_CAMERA_ALTITUDE};
pub use config::{ConfigError, GenerationConfig, Style};
pub use distractors::{place_distractors, BIRD_COUNT, DISTRACTOR_COUNT};
pub use environment::{select_environment, EnvironmentChoice, EnvironmentLibrary};
pub use swarm::{
    drone_offsets, generate_swarm_path, swarm_centroid, swarm_path, SwarmPath, FLIGHT_BOX_MAX, FLIGHT_BOX_MIN,
    MIN_DRONE_SEPARATION,
};

use crate::camera::{CameraSpec, Projection};
use crate::rng::{Purpose, StreamKey};
use crate::scene::{drone_model, Category, HdriEnvironment, Mesh, SceneError, DRONE_MODEL_COUNT};
use crate::Pose;

/// Camera re-draws allowed when no drone lands in the image.
pub const MAX_CAMERA_RESAMPLES: u32 = 8;

#[derive(Debug, thiserror::Error)]
pub enum RandomizerError {
    #[error("environment library is empty")]
    EmptyLibrary,
    #[error("style {0} has no distractors")]
    StyleMismatch(Style),
    #[error("bad environment entry {0:?}")]
    BadEnvironment(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

/// An entity with its full per-frame trajectory for one segment.
#[derive(Debug, Clone)]
pub struct SceneEntity {
    pub mesh: Arc<Mesh>,
    pub category: Category,
    /// Model or shape name, for audit.
    pub label: String,
    pub trajectory: Vec<Pose>,
    pub instance_id: u32,
}

/// An entity resolved at one frame.
#[derive(Debug, Clone)]
pub struct PosedEntity {
    pub mesh: Arc<Mesh>,
    pub category: Category,
    pub label: String,
    pub pose: Pose,
    pub instance_id: u32,
}

impl SceneEntity {
    pub fn at(&self, frame_in_segment: usize) -> PosedEntity {
        PosedEntity {
            mesh: self.mesh.clone(),
            category: self.category,
            label: self.label.clone(),
            pose: self.trajectory[frame_in_segment],
            instance_id: self.instance_id,
        }
    }
}

/// Exactly one background source per frame.
#[derive(Debug, Clone)]
pub enum Background {
    Hdri(HdriEnvironment),
    Image(Arc<RgbImage>),
}

/// One substream used while building a frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub purpose: Purpose,
    pub extra: u64,
    pub fingerprint: u64,
}

#[derive(Debug, Clone)]
pub struct SceneFrame {
    pub frame_index: u64,
    pub segment_index: u64,
    pub entities: Vec<PosedEntity>,
    pub camera: CameraSpec,
    pub background: Background,
    pub rng_trace: Vec<TraceEntry>,
    /// Set when no drone landed in the image after all camera re-draws.
    pub empty_of_target: bool,
    /// Camera draws used (1 when the first draw framed a drone).
    pub camera_attempts: u32,
}

impl SceneFrame {
    pub fn categories(&self) -> std::collections::BTreeMap<u32, Category> {
        self.entities.iter().map(|e| (e.instance_id, e.category)).collect()
    }
}

/// Number of drones in a segment, uniform over `drones_per_scene`.
pub fn segment_drone_count(master_seed: u64, segment_index: u64, config: &GenerationConfig) -> usize {
    let [lo, hi] = config.drones_per_scene;
    StreamKey::new(master_seed, segment_index, swarm::SEGMENT_FRAME, Purpose::DroneCount)
        .rng()
        .random_range(lo..=hi)
}

/// Drone entities of a segment with instance ids `1..=n`.
pub fn drone_entities(master_seed: u64, segment_index: u64, config: &GenerationConfig, models: &[Arc<Mesh>]) -> Vec<SceneEntity> {
    let n = segment_drone_count(master_seed, segment_index, config);
    let trajectories = generate_swarm_path(master_seed, segment_index, n, config.segment_length);
    let mut rng = StreamKey::new(master_seed, segment_index, swarm::SEGMENT_FRAME, Purpose::DroneModels).rng();
    trajectories
        .into_iter()
        .enumerate()
        .map(|(i, trajectory)| {
            let model = rng.random_range(0..models.len());
            SceneEntity {
                mesh: models[model].clone(),
                category: Category::Drone,
                label: format!("drone-{model}"),
                trajectory,
                instance_id: i as u32 + 1,
            }
        })
        .collect()
}

fn inside_image(p: Projection, cam: &CameraSpec) -> bool {
    match p {
        Projection::Visible { x, y, .. } => {
            x >= 0.0 && y >= 0.0 && x < cam.image_width as f64 && y < cam.image_height as f64
        }
        Projection::BehindCamera => false,
    }
}

/// Frame builder bound to one configuration and its loaded assets.
#[derive(Debug, Clone)]
pub struct Randomizer {
    config: GenerationConfig,
    library: EnvironmentLibrary,
    drone_models: Vec<Arc<Mesh>>,
}

impl Randomizer {
    pub fn new(config: GenerationConfig, library: EnvironmentLibrary) -> Result<Self, RandomizerError> {
        config.validate()?;
        if config.style.uses_hdri() && library.is_empty() {
            return Err(RandomizerError::EmptyLibrary);
        }
        Ok(Self {
            config,
            library,
            drone_models: (0..DRONE_MODEL_COUNT).map(|i| Arc::new(drone_model(i))).collect(),
        })
    }

    /// Replaces the stand-in drone meshes (e.g. with loaded OBJ models).
    pub fn with_drone_models(mut self, models: Vec<Mesh>) -> Self {
        if !models.is_empty() {
            self.drone_models = models.into_iter().map(Arc::new).collect();
        }
        self
    }

    pub fn config(&self) -> &GenerationConfig {
        &self.config
    }

    /// Every entity of a segment, drones first.
    pub fn segment_entities(&self, master_seed: u64, segment_index: u64) -> Result<Vec<SceneEntity>, RandomizerError> {
        let mut entities = drone_entities(master_seed, segment_index, &self.config, &self.drone_models);
        let style = self.config.style;
        if style.has_birds() || style.has_distractors() {
            entities.extend(place_distractors(master_seed, segment_index, style, &self.config)?);
        }
        Ok(entities)
    }

    pub fn build_frame(&self, master_seed: u64, global_frame_index: u64) -> Result<SceneFrame, RandomizerError> {
        let cfg = &self.config;
        let len = cfg.segment_length as u64;
        let segment_index = global_frame_index / len;
        let local = (global_frame_index % len) as usize;
        let seg_key = |p| StreamKey::new(master_seed, segment_index, swarm::SEGMENT_FRAME, p);
        let mut trace: Vec<TraceEntry> = Vec::new();
        let mut record = |k: StreamKey| {
            trace.push(TraceEntry {
                purpose: k.purpose,
                extra: k.extra,
                fingerprint: k.fingerprint(),
            })
        };
        for p in [Purpose::DroneCount, Purpose::SwarmPath, Purpose::SwarmOffsets, Purpose::DroneModels] {
            record(seg_key(p));
        }

        let entities: Vec<PosedEntity> = self
            .segment_entities(master_seed, segment_index)?
            .iter()
            .map(|e| e.at(local))
            .collect();
        if cfg.style.has_birds() {
            record(seg_key(Purpose::Birds));
        }
        if cfg.style.has_distractors() {
            record(seg_key(Purpose::Distractors));
        }

        let background = if cfg.style.uses_hdri() {
            record(seg_key(Purpose::Environment));
            Background::Hdri(select_environment(master_seed, segment_index, &self.library)?.environment)
        } else {
            record(StreamKey::new(master_seed, 0, global_frame_index, Purpose::Background));
            Background::Image(Arc::new(synthesize_random_background(
                master_seed,
                global_frame_index,
                cfg.image_width,
                cfg.image_height,
            )))
        };

        let drones: Vec<&PosedEntity> = entities.iter().filter(|e| e.category == Category::Drone).collect();
        let centroid = drones.iter().fold(crate::Vec3::zero(), |a, e| a + e.pose.translation) / drones.len() as f64;
        let mut camera = sample_camera(master_seed, segment_index, global_frame_index, cfg, centroid);
        let mut attempts = 1;
        record(StreamKey::new(master_seed, segment_index, global_frame_index, Purpose::Camera));
        let framed = |c: &CameraSpec| drones.iter().any(|e| inside_image(c.project(e.pose.translation), c));
        let mut empty = !framed(&camera);
        while empty && attempts <= MAX_CAMERA_RESAMPLES {
            let key = StreamKey::new(master_seed, segment_index, global_frame_index, Purpose::Camera).with_extra(attempts as u64);
            camera = sample_camera_attempt(master_seed, segment_index, global_frame_index, cfg, centroid, attempts as u64);
            attempts += 1;
            trace.push(TraceEntry {
                purpose: key.purpose,
                extra: key.extra,
                fingerprint: key.fingerprint(),
            });
            empty = !framed(&camera);
        }

        Ok(SceneFrame {
            frame_index: global_frame_index,
            segment_index,
            entities,
            camera,
            background,
            rng_trace: trace,
            empty_of_target: empty,
            camera_attempts: attempts,
        })
    }
}
