use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{AnnotateError, Rle};
use crate::scene::Category;

pub const ANNOTATIONS_FILE: &str = "annotations.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageRecord {
    pub id: u64,
    pub file_name: String,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRecord {
    pub id: u32,
    pub name: String,
}

impl From<Category> for CategoryRecord {
    fn from(c: Category) -> Self {
        Self {
            id: c.id(),
            name: c.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u32,
    /// `[x, y, w, h]` in pixels.
    pub bbox: [f64; 4],
    /// Mask pixel count, or box area for box-only ground truth.
    pub area: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segmentation: Option<Rle>,
    pub iscrowd: u8,
}

impl Annotation {
    pub fn category(&self) -> Option<Category> {
        Category::from_id(self.category_id)
    }
}

/// Generation provenance, stored in the COCO `info` block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub description: String,
    pub config_hash: String,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetManifest {
    #[serde(rename = "info", default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    pub images: Vec<ImageRecord>,
    pub annotations: Vec<Annotation>,
    pub categories: Vec<CategoryRecord>,
}

impl DatasetManifest {
    /// Compact JSON with fixed field order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    /// Copy without annotations and categories of the excluded kinds.
    pub fn filtered(&self, include_birds: bool, include_distractors: bool) -> Self {
        let keep = |id: u32| match Category::from_id(id) {
            Some(Category::Bird) => include_birds,
            Some(Category::Distractor) => include_distractors,
            _ => true,
        };
        Self {
            provenance: self.provenance.clone(),
            images: self.images.clone(),
            annotations: self.annotations.iter().filter(|a| keep(a.category_id)).cloned().collect(),
            categories: self.categories.iter().filter(|c| keep(c.id)).cloned().collect(),
        }
    }
}

/// Writes `annotations.json` into `dir`; bird and distractor annotations are
/// only kept when requested.
pub fn write_dataset(
    manifest: &DatasetManifest,
    include_birds: bool,
    include_distractors: bool,
    dir: &Path,
) -> Result<PathBuf, AnnotateError> {
    let path = dir.join(ANNOTATIONS_FILE);
    let json = manifest.filtered(include_birds, include_distractors).to_json();
    std::fs::write(&path, json).map_err(|source| AnnotateError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
