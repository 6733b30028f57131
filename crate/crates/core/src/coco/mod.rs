//! COCO ground-truth and results files.
//!
//! Strict mode rejects keys outside the COCO detection schema; lenient mode
//! records them as diagnostics. Non-finite numbers are rejected everywhere.

mod rle_string;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::annotate::{Annotation, CategoryRecord, DatasetManifest, ImageRecord, Provenance, Rle};
use crate::metrics::Detection;

pub use rle_string::decode_counts_string;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, thiserror::Error)]
pub enum CocoError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {location}: {message}")]
    Schema {
        path: PathBuf,
        location: String,
        message: String,
    },
    #[error("{path}: integrity: {detail}")]
    Integrity { path: PathBuf, detail: String },
    #[error("{path}: {location}: {message}")]
    Range {
        path: PathBuf,
        location: String,
        message: String,
    },
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CocoError {
    pub fn kind(&self) -> &'static str {
        match self {
            CocoError::Parse { .. } => "ParseError",
            CocoError::Schema { .. } => "SchemaError",
            CocoError::Integrity { .. } => "IntegrityError",
            CocoError::Range { .. } => "RangeError",
            CocoError::Io { .. } => "IoError",
        }
    }
}

/// Parsed ground truth with its source and any tolerated irregularities.
#[derive(Debug, Clone, PartialEq)]
pub struct CocoDocument {
    pub source: PathBuf,
    pub manifest: DatasetManifest,
    pub diagnostics: Vec<String>,
}

/// Parsed results file.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultsDocument {
    pub source: PathBuf,
    pub detections: Vec<Detection>,
    pub diagnostics: Vec<String>,
}

struct Ctx<'a> {
    path: &'a Path,
    strictness: Strictness,
    diagnostics: Vec<String>,
}

impl Ctx<'_> {
    fn schema(&self, location: &str, message: impl Into<String>) -> CocoError {
        CocoError::Schema {
            path: self.path.to_path_buf(),
            location: location.to_string(),
            message: message.into(),
        }
    }

    fn integrity(&self, detail: impl Into<String>) -> CocoError {
        CocoError::Integrity {
            path: self.path.to_path_buf(),
            detail: detail.into(),
        }
    }

    fn range(&self, location: &str, message: impl Into<String>) -> CocoError {
        CocoError::Range {
            path: self.path.to_path_buf(),
            location: location.to_string(),
            message: message.into(),
        }
    }

    fn check_keys(&mut self, obj: &Map<String, Value>, allowed: &[&str], location: &str) -> Result<(), CocoError> {
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                match self.strictness {
                    Strictness::Strict => return Err(self.schema(location, format!("unknown key `{key}`"))),
                    Strictness::Lenient => self.diagnostics.push(format!("{location}: ignored unknown key `{key}`")),
                }
            }
        }
        Ok(())
    }

    fn object<'v>(&self, v: &'v Value, location: &str) -> Result<&'v Map<String, Value>, CocoError> {
        v.as_object().ok_or_else(|| self.schema(location, "expected an object"))
    }

    fn array<'v>(&self, v: &'v Value, location: &str) -> Result<&'v Vec<Value>, CocoError> {
        v.as_array().ok_or_else(|| self.schema(location, "expected an array"))
    }

    fn field<'v>(&self, obj: &'v Map<String, Value>, key: &str, location: &str) -> Result<&'v Value, CocoError> {
        obj.get(key).ok_or_else(|| self.schema(location, format!("missing key `{key}`")))
    }

    fn uint(&self, obj: &Map<String, Value>, key: &str, location: &str) -> Result<u64, CocoError> {
        self.field(obj, key, location)?
            .as_u64()
            .ok_or_else(|| self.schema(&format!("{location}.{key}"), "expected a non-negative integer"))
    }

    fn u32(&self, obj: &Map<String, Value>, key: &str, location: &str) -> Result<u32, CocoError> {
        let v = self.uint(obj, key, location)?;
        u32::try_from(v).map_err(|_| self.schema(&format!("{location}.{key}"), "integer out of range"))
    }

    fn number(&self, v: &Value, location: &str) -> Result<f64, CocoError> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Ok(x),
            _ => Err(self.schema(location, "expected a finite number")),
        }
    }

    fn string(&self, obj: &Map<String, Value>, key: &str, location: &str) -> Result<String, CocoError> {
        self.field(obj, key, location)?
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| self.schema(&format!("{location}.{key}"), "expected a string"))
    }

    fn bbox(&self, obj: &Map<String, Value>, location: &str) -> Result<[f64; 4], CocoError> {
        let loc = format!("{location}.bbox");
        let arr = self.array(self.field(obj, "bbox", location)?, &loc)?;
        if arr.len() != 4 {
            return Err(self.schema(&loc, format!("expected 4 numbers, found {}", arr.len())));
        }
        let mut b = [0.0; 4];
        for (i, v) in arr.iter().enumerate() {
            b[i] = self.number(v, &format!("{loc}[{i}]"))?;
        }
        Ok(b)
    }
}

fn read_text(path: &Path) -> Result<String, CocoError> {
    std::fs::read_to_string(path).map_err(|source| CocoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_json(text: &str, path: &Path) -> Result<Value, CocoError> {
    serde_json::from_str(text).map_err(|e| CocoError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

const TOP_KEYS: &[&str] = &["images", "annotations", "categories", "info", "licenses"];
const IMAGE_KEYS: &[&str] = &["id", "file_name", "width", "height", "license", "flickr_url", "coco_url", "date_captured"];
const CATEGORY_KEYS: &[&str] = &["id", "name", "supercategory"];
const ANNOTATION_KEYS: &[&str] = &["id", "image_id", "category_id", "bbox", "area", "segmentation", "iscrowd"];
const RESULT_KEYS: &[&str] = &["image_id", "category_id", "bbox", "score"];

fn parse_segmentation(ctx: &mut Ctx<'_>, v: &Value, location: &str) -> Result<Option<Rle>, CocoError> {
    match v {
        Value::Null => Ok(None),
        Value::Array(_) => {
            ctx.diagnostics.push(format!("{location}: polygon segmentation treated as box-only"));
            Ok(None)
        }
        Value::Object(obj) => {
            let size = ctx.array(ctx.field(obj, "size", location)?, &format!("{location}.size"))?;
            let dims: Vec<u32> = size.iter().filter_map(|s| s.as_u64()).filter_map(|s| u32::try_from(s).ok()).collect();
            if dims.len() != 2 || size.len() != 2 {
                return Err(ctx.schema(&format!("{location}.size"), "expected [height, width]"));
            }
            let counts = match ctx.field(obj, "counts", location)? {
                Value::Array(items) => items
                    .iter()
                    .map(|c| c.as_u64().and_then(|c| u32::try_from(c).ok()))
                    .collect::<Option<Vec<u32>>>()
                    .ok_or_else(|| ctx.schema(&format!("{location}.counts"), "expected non-negative integers"))?,
                Value::String(s) => decode_counts_string(s).map_err(|m| ctx.schema(&format!("{location}.counts"), m))?,
                _ => return Err(ctx.schema(&format!("{location}.counts"), "expected an array or string")),
            };
            let rle = Rle {
                counts,
                size: [dims[0], dims[1]],
            };
            let total: u64 = rle.counts.iter().map(|&c| c as u64).sum();
            if total != dims[0] as u64 * dims[1] as u64 {
                return Err(ctx.integrity(format!("{location}: rle counts sum to {total}, size is {}x{}", dims[0], dims[1])));
            }
            Ok(Some(rle))
        }
        _ => Err(ctx.schema(location, "expected an object, array or null")),
    }
}

/// Parses ground truth from text; `source` is used in messages.
pub fn parse_ground_truth(text: &str, source: &Path, strictness: Strictness) -> Result<CocoDocument, CocoError> {
    let root = parse_json(text, source)?;
    let mut ctx = Ctx {
        path: source,
        strictness,
        diagnostics: Vec::new(),
    };
    let top = ctx.object(&root, "$")?;
    ctx.check_keys(top, TOP_KEYS, "$")?;

    let provenance = top.get("info").and_then(|i| serde_json::from_value::<Provenance>(i.clone()).ok());

    let mut images = Vec::new();
    let mut image_ids = BTreeSet::new();
    for (i, v) in ctx.array(ctx.field(top, "images", "$")?, "$.images")?.iter().enumerate() {
        let loc = format!("$.images[{i}]");
        let obj = ctx.object(v, &loc)?;
        ctx.check_keys(obj, IMAGE_KEYS, &loc)?;
        let rec = ImageRecord {
            id: ctx.uint(obj, "id", &loc)?,
            file_name: ctx.string(obj, "file_name", &loc)?,
            width: ctx.u32(obj, "width", &loc)?,
            height: ctx.u32(obj, "height", &loc)?,
        };
        if !image_ids.insert(rec.id) {
            return Err(ctx.integrity(format!("duplicate image id {}", rec.id)));
        }
        images.push(rec);
    }

    let mut categories = Vec::new();
    let mut category_ids = BTreeSet::new();
    for (i, v) in ctx.array(ctx.field(top, "categories", "$")?, "$.categories")?.iter().enumerate() {
        let loc = format!("$.categories[{i}]");
        let obj = ctx.object(v, &loc)?;
        ctx.check_keys(obj, CATEGORY_KEYS, &loc)?;
        let rec = CategoryRecord {
            id: ctx.u32(obj, "id", &loc)?,
            name: ctx.string(obj, "name", &loc)?,
        };
        if !category_ids.insert(rec.id) {
            return Err(ctx.integrity(format!("duplicate category id {}", rec.id)));
        }
        categories.push(rec);
    }

    let mut annotations = Vec::new();
    let mut annotation_ids = BTreeSet::new();
    for (i, v) in ctx.array(ctx.field(top, "annotations", "$")?, "$.annotations")?.iter().enumerate() {
        let loc = format!("$.annotations[{i}]");
        let obj = ctx.object(v, &loc)?;
        ctx.check_keys(obj, ANNOTATION_KEYS, &loc)?;
        let id = ctx.uint(obj, "id", &loc)?;
        let image_id = ctx.uint(obj, "image_id", &loc)?;
        let category_id = ctx.u32(obj, "category_id", &loc)?;
        let bbox = ctx.bbox(obj, &loc)?;
        if bbox[2] < 0.0 || bbox[3] < 0.0 {
            return Err(ctx.range(&format!("{loc}.bbox"), "negative width or height"));
        }
        let segmentation = match obj.get("segmentation") {
            Some(v) => parse_segmentation(&mut ctx, v, &format!("{loc}.segmentation"))?,
            None => None,
        };
        let area = match obj.get("area") {
            Some(v) => ctx.number(v, &format!("{loc}.area"))?,
            None => match &segmentation {
                Some(rle) => rle.area() as f64,
                None => bbox[2] * bbox[3],
            },
        };
        let iscrowd = match obj.get("iscrowd") {
            None => 0,
            Some(Value::Bool(b)) => *b as u8,
            Some(v) => match v.as_u64() {
                Some(0) => 0,
                Some(1) => 1,
                _ => return Err(ctx.schema(&format!("{loc}.iscrowd"), "expected 0 or 1")),
            },
        };
        if !annotation_ids.insert(id) {
            return Err(ctx.integrity(format!("duplicate annotation id {id}")));
        }
        if !image_ids.contains(&image_id) {
            return Err(ctx.integrity(format!("annotation {id} references missing image_id {image_id}")));
        }
        if !category_ids.contains(&category_id) {
            return Err(ctx.integrity(format!("annotation {id} references missing category_id {category_id}")));
        }
        annotations.push(Annotation {
            id,
            image_id,
            category_id,
            bbox,
            area,
            segmentation,
            iscrowd,
        });
    }

    Ok(CocoDocument {
        source: source.to_path_buf(),
        manifest: DatasetManifest {
            provenance,
            images,
            annotations,
            categories,
        },
        diagnostics: ctx.diagnostics,
    })
}

pub fn read_ground_truth_with(path: &Path, strictness: Strictness) -> Result<CocoDocument, CocoError> {
    parse_ground_truth(&read_text(path)?, path, strictness)
}

/// Strict ground-truth read.
pub fn read_ground_truth(path: &Path) -> Result<DatasetManifest, CocoError> {
    read_ground_truth_with(path, Strictness::Strict).map(|d| d.manifest)
}

pub fn parse_results(text: &str, source: &Path, strictness: Strictness) -> Result<ResultsDocument, CocoError> {
    let root = parse_json(text, source)?;
    let mut ctx = Ctx {
        path: source,
        strictness,
        diagnostics: Vec::new(),
    };
    let mut detections = Vec::new();
    for (i, v) in ctx.array(&root, "$")?.iter().enumerate() {
        let loc = format!("$[{i}]");
        let obj = ctx.object(v, &loc)?;
        ctx.check_keys(obj, RESULT_KEYS, &loc)?;
        let score = ctx.number(ctx.field(obj, "score", &loc)?, &format!("{loc}.score"))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(ctx.range(&format!("{loc}.score"), format!("score {score} outside [0, 1]")));
        }
        let bbox = ctx.bbox(obj, &loc)?;
        if bbox[2] <= 0.0 || bbox[3] <= 0.0 {
            return Err(ctx.range(&format!("{loc}.bbox"), "width and height must be positive"));
        }
        detections.push(Detection {
            image_id: ctx.uint(obj, "image_id", &loc)?,
            category_id: ctx.u32(obj, "category_id", &loc)?,
            bbox,
            score,
        });
    }
    Ok(ResultsDocument {
        source: source.to_path_buf(),
        detections,
        diagnostics: ctx.diagnostics,
    })
}

pub fn read_results_with(path: &Path, strictness: Strictness) -> Result<ResultsDocument, CocoError> {
    parse_results(&read_text(path)?, path, strictness)
}

/// Strict results read, file order preserved.
pub fn read_results(path: &Path) -> Result<Vec<Detection>, CocoError> {
    read_results_with(path, Strictness::Strict).map(|d| d.detections)
}

pub fn results_to_json(detections: &[Detection]) -> String {
    serde_json::to_string(detections).expect("detections serialize")
}

pub fn write_results(detections: &[Detection], path: &Path) -> Result<(), CocoError> {
    std::fs::write(path, results_to_json(detections)).map_err(|source| CocoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Compact ground-truth JSON, identical to what the annotator writes.
pub fn write_ground_truth(manifest: &DatasetManifest, path: &Path) -> Result<(), CocoError> {
    std::fs::write(path, manifest.to_json()).map_err(|source| CocoError::Io {
        path: path.to_path_buf(),
        source,
    })
}
