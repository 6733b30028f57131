use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{add_gaussian_noise, encode_jpeg, select_subset, AugmentationPlan};
use crate::annotate::{DatasetManifest, ANNOTATIONS_FILE};
use crate::coco::{read_ground_truth, CocoError};

pub const REPORT_FILE: &str = "augmentation_report.json";

#[derive(Debug, thiserror::Error)]
pub enum AugmentError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("image error on {path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("manifest references missing images: {}", .0.join(", "))]
    ManifestMismatch(Vec<String>),
    #[error("dataset already augmented (see {0})")]
    AlreadyAugmented(PathBuf),
    #[error("invalid plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Coco(#[from] CocoError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub image_id: u64,
    pub original_file: String,
    pub file_name: String,
    /// Applied in order.
    pub operations: Vec<String>,
    pub jpeg_quality: Option<u8>,
    pub noise_sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationReport {
    pub plan: AugmentationPlan,
    /// Set once files have been rewritten; a dataset with an applied report
    /// is never augmented again.
    pub applied: bool,
    pub images_total: usize,
    pub entries: Vec<ReportEntry>,
}

fn jpg_name(file_name: &str) -> String {
    let p = Path::new(file_name);
    p.with_extension("jpg").to_string_lossy().into_owned()
}

/// The report `apply_plan` would produce, without touching any file.
pub fn plan_report(plan: &AugmentationPlan, manifest: &DatasetManifest) -> AugmentationReport {
    let ids: Vec<u64> = manifest.images.iter().map(|i| i.id).collect();
    let subset = if plan.jpeg_enabled || plan.noise_enabled {
        select_subset(plan.seed, &ids, plan.subset_fraction)
    } else {
        Default::default()
    };
    let entries = manifest
        .images
        .iter()
        .filter(|img| subset.contains(&img.id))
        .map(|img| {
            let (quality, sigma) = plan.draw_parameters(img.id);
            let mut operations = Vec::new();
            if plan.noise_enabled {
                operations.push("gaussian_noise".to_string());
            }
            if plan.jpeg_enabled {
                operations.push("jpeg".to_string());
            }
            ReportEntry {
                image_id: img.id,
                original_file: img.file_name.clone(),
                file_name: if plan.jpeg_enabled { jpg_name(&img.file_name) } else { img.file_name.clone() },
                operations,
                jpeg_quality: plan.jpeg_enabled.then_some(quality),
                noise_sigma: plan.noise_enabled.then_some(sigma),
            }
        })
        .collect();
    AugmentationReport {
        plan: plan.clone(),
        applied: false,
        images_total: manifest.images.len(),
        entries,
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> AugmentError + '_ {
    move |source| AugmentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn augment_one(dir: &Path, plan: &AugmentationPlan, e: &ReportEntry) -> Result<(), AugmentError> {
    let src = dir.join(&e.original_file);
    let mut img = image::open(&src)
        .map_err(|err| AugmentError::Image {
            path: src.clone(),
            message: err.to_string(),
        })?
        .to_rgb8();
    if let Some(sigma) = e.noise_sigma {
        img = add_gaussian_noise(&img, sigma, plan.seed, e.image_id);
    }
    let dst = dir.join(&e.file_name);
    match e.jpeg_quality {
        Some(q) => {
            std::fs::write(&dst, encode_jpeg(&img, q)).map_err(io_err(&dst))?;
            if dst != src {
                std::fs::remove_file(&src).map_err(io_err(&src))?;
            }
        }
        None => img
            .save_with_format(&dst, image::ImageFormat::Png)
            .map_err(|err| AugmentError::Image {
                path: dst.clone(),
                message: err.to_string(),
            })?,
    }
    Ok(())
}

/// Rewrites the selected images of the dataset in `dir`, updates file names
/// in its manifest and stores the report next to it.
pub fn apply_plan(plan: &AugmentationPlan, dir: &Path) -> Result<AugmentationReport, AugmentError> {
    plan.validate().map_err(AugmentError::InvalidPlan)?;
    if !dir.is_dir() {
        return Err(AugmentError::Io {
            path: dir.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "dataset directory not found"),
        });
    }
    let report_path = dir.join(REPORT_FILE);
    if report_path.exists() {
        let text = std::fs::read_to_string(&report_path).map_err(io_err(&report_path))?;
        if serde_json::from_str::<AugmentationReport>(&text).map(|r| r.applied).unwrap_or(true) {
            return Err(AugmentError::AlreadyAugmented(report_path));
        }
    }
    let manifest_path = dir.join(ANNOTATIONS_FILE);
    let mut manifest = read_ground_truth(&manifest_path)?;
    let missing: Vec<String> = manifest
        .images
        .iter()
        .filter(|i| !dir.join(&i.file_name).is_file())
        .map(|i| i.file_name.clone())
        .collect();
    if !missing.is_empty() {
        return Err(AugmentError::ManifestMismatch(missing));
    }

    let mut report = plan_report(plan, &manifest);
    report
        .entries
        .par_iter()
        .map(|e| augment_one(dir, plan, e))
        .collect::<Result<Vec<()>, _>>()?;

    let renamed: std::collections::BTreeMap<u64, &str> = report.entries.iter().map(|e| (e.image_id, e.file_name.as_str())).collect();
    for img in &mut manifest.images {
        if let Some(name) = renamed.get(&img.id) {
            img.file_name = name.to_string();
        }
    }
    std::fs::write(&manifest_path, manifest.to_json()).map_err(io_err(&manifest_path))?;
    report.applied = true;
    std::fs::write(&report_path, serde_json::to_string_pretty(&report).expect("report serializes")).map_err(io_err(&report_path))?;
    Ok(report)
}
