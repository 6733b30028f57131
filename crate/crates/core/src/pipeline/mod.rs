//! End-to-end operations behind the command line.

mod dataset_config;
mod generate;
mod preview;

use std::path::{Path, PathBuf};

pub use dataset_config::{load_dataset_config, resolve_seed, DatasetConfig, DatasetPart, SEED_ENV};
pub use generate::{
    frame_annotations, generate, image_file_name, FrameRecord, GenerateOptions, GenerateSummary, HASH_FILE,
};
pub use preview::{preview, CONTACT_SHEET_BOX};

use crate::annotate::AnnotateError;
use crate::augment::{apply_plan, AugmentError, AugmentationPlan, AugmentationReport};
use crate::coco::{read_ground_truth_with, read_results_with, CocoError, Strictness};
use crate::metrics::{evaluate, EvalParams, EvalResult, MetricsError};
use crate::randomizer::{ConfigError, RandomizerError};
use crate::render::RenderError;
use crate::stats::{aggregate_runs, read_runs_dir, AggregateTable, StatsError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("io error on {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Randomizer(#[from] RandomizerError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Annotate(#[from] AnnotateError),
    #[error(transparent)]
    Coco(#[from] CocoError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{0}")]
    Conflict(String),
}

impl Error {
    pub fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    /// Stable machine-readable error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "ConfigError",
            Error::Io { .. } => "IoError",
            Error::Randomizer(RandomizerError::Config(_)) => "ConfigError",
            Error::Randomizer(_) => "SceneError",
            Error::Render(_) => "IoError",
            Error::Annotate(AnnotateError::UnknownId(_)) => "UnknownId",
            Error::Annotate(_) => "IoError",
            Error::Coco(e) => e.kind(),
            Error::Metrics(MetricsError::UnknownImageId(_)) => "UnknownImageId",
            Error::Metrics(MetricsError::UnknownCategory(_)) => "UnknownCategory",
            Error::Metrics(MetricsError::DegenerateBox(..)) => "DegenerateBox",
            Error::Augment(AugmentError::ManifestMismatch(_)) => "ManifestMismatch",
            Error::Augment(AugmentError::Coco(e)) => e.kind(),
            Error::Augment(AugmentError::InvalidPlan(_)) => "ConfigError",
            Error::Augment(AugmentError::AlreadyAugmented(_)) => "AlreadyAugmented",
            Error::Augment(_) => "IoError",
            Error::Stats(StatsError::EmptyGroup(_)) => "EmptyGroup",
            Error::Stats(StatsError::Parse { .. }) => "ParseError",
            Error::Stats(_) => "IoError",
            Error::Conflict(_) => "OutputConflict",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Scores a results file against a ground-truth file and writes the result as JSON.
pub fn evaluate_files(
    gt: &Path,
    pred: &Path,
    out: Option<&Path>,
    strictness: Strictness,
    params: &EvalParams,
) -> Result<EvalResult> {
    let gt = read_ground_truth_with(gt, strictness)?;
    let pred = read_results_with(pred, strictness)?;
    let result = evaluate(&gt.manifest, &pred.detections, params)?;
    if let Some(out) = out {
        write_text(out, &serde_json::to_string_pretty(&result).expect("result serializes"))?;
    }
    Ok(result)
}

/// Aggregates `<runs>/<group>/<run>.json`, writing CSV to `out` and JSON next to it.
pub fn aggregate_dir(runs: &Path, out: &Path, level: f64) -> Result<AggregateTable> {
    let groups = read_runs_dir(runs)?;
    let table = aggregate_runs(&groups, level)?;
    write_text(out, &table.to_csv())?;
    write_text(&out.with_extension("json"), &table.to_json())?;
    Ok(table)
}

pub fn load_plan(path: &Path) -> Result<AugmentationPlan> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    AugmentationPlan::from_json_str(&text).map_err(|m| Error::Augment(AugmentError::InvalidPlan(format!("{}: {m}", path.display()))))
}

pub fn augment_dataset(dataset: &Path, plan: &AugmentationPlan) -> Result<AugmentationReport> {
    Ok(apply_plan(plan, dataset)?)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
