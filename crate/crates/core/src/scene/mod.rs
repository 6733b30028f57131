//! Geometry and asset layer: meshes, entity categories and environment maps.

mod hdri;
mod mesh;
mod models;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use hdri::{load_hdri, EnvStats, HdriEnvironment};
pub use mesh::{load_mesh, make_primitive, parse_obj, write_obj, Mesh, PrimitiveKind};
pub use models::{bird_mesh, drone_model, prop_mesh, PropKind, DRONE_MODEL_COUNT};

/// RGB triple with channels in `[0, 1]`.
pub type Color = [f64; 3];

/// Semantic class of a scene entity. Also the COCO category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Drone,
    Bird,
    Distractor,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Drone, Category::Bird, Category::Distractor];

    /// COCO category id.
    pub fn id(self) -> u32 {
        match self {
            Category::Drone => 1,
            Category::Bird => 2,
            Category::Distractor => 3,
        }
    }

    pub fn from_id(id: u32) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.id() == id)
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Drone => "drone",
            Category::Bird => "bird",
            Category::Distractor => "distractor",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("mesh needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("triangle {triangle} references vertex {index} but mesh has {count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: u32,
        count: usize,
    },
    #[error("triangle {0} is degenerate")]
    DegenerateTriangle(usize),
    #[error("invalid primitive size {0}; must be > 0")]
    InvalidSize(f64),
    #[error("environment map is {width}x{height}; width must be twice the height")]
    Aspect { width: u32, height: u32 },
    #[error("environment map has a negative or non-finite channel value")]
    NegativeRadiance,
    #[error("image decode error on {path}: {message}")]
    Decode { path: PathBuf, message: String },
}

/// Rec. 709 luminance of an 8-bit color, in `[0, 1]`.
pub fn luminance_u8(c: [u8; 3]) -> f64 {
    hdri::luminance(c.map(|v| v as f64 / 255.0))
}
