//! Procedural synthetic-dataset foundry for drone detection.
//!
//! The generation side builds randomized scenes ([`randomizer`]), rasterizes
//! them with an exact per-pixel instance buffer ([`render`]), converts the
//! buffer into COCO ground truth ([`annotate`]) and applies offline
//! augmentations ([`augment`]). The evaluation side scores any detector's
//! COCO results file ([`metrics`]) and aggregates repeated runs into means
//! with Student-t confidence intervals ([`stats`]).
//!
//! Geometry, box and statistics code is generic over [`Scalar`] (`f32` or
//! `f64`); the aliases below fix the scalar to `f64` for the pipeline.

pub mod annotate;
pub mod augment;
pub mod camera;
pub mod coco;
pub mod geometry;
pub mod metrics;
pub mod pipeline;
pub mod randomizer;
pub mod render;
pub mod rng;
pub mod scalar;
pub mod scene;
pub mod stats;

pub use scalar::Scalar;

pub type Vec3 = geometry::Vector3<f64>;
pub type Vec3f = geometry::Vector3<f32>;
pub type Quat = geometry::Quaternion<f64>;
pub type Pose = geometry::Pose<f64>;
