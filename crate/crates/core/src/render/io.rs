use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use image::{ImageBuffer, Luma, RgbImage};

use super::RenderOutput;
use crate::scene::Category;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("image error on {path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("instance id {0} does not fit in 16 bits")]
    IdOverflow(u32),
    #[error("sidecar {path}: {message}")]
    Sidecar { path: PathBuf, message: String },
}

fn image_err(path: &Path, e: impl std::fmt::Display) -> RenderError {
    RenderError::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Lossless 8-bit RGB PNG.
pub fn write_rgb_png(img: &RgbImage, path: &Path) -> Result<(), RenderError> {
    img.save_with_format(path, image::ImageFormat::Png).map_err(|e| image_err(path, e))
}

/// Instance buffer as 16-bit grayscale PNG.
pub fn write_instance_png(out: &RenderOutput, path: &Path) -> Result<(), RenderError> {
    let mut data = Vec::with_capacity(out.instance_ids.len());
    for &id in &out.instance_ids {
        data.push(u16::try_from(id).map_err(|_| RenderError::IdOverflow(id))?);
    }
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(out.width(), out.height(), data).expect("buffer matches dimensions");
    buf.save_with_format(path, image::ImageFormat::Png).map_err(|e| image_err(path, e))
}

/// Reads a 16-bit instance PNG back as `(width, height, ids)`.
pub fn read_instance_png(path: &Path) -> Result<(u32, u32, Vec<u32>), RenderError> {
    let img = image::open(path).map_err(|e| image_err(path, e))?.into_luma16();
    let (w, h) = img.dimensions();
    Ok((w, h, img.into_raw().into_iter().map(u32::from).collect()))
}

/// `{"<id>": "<category>"}` sidecar next to an instance PNG.
pub fn write_sidecar(map: &BTreeMap<u32, Category>, path: &Path) -> Result<(), RenderError> {
    let text = serde_json::to_string_pretty(map).expect("map serializes");
    std::fs::write(path, text).map_err(|source| RenderError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_sidecar(path: &Path) -> Result<BTreeMap<u32, Category>, RenderError> {
    let text = std::fs::read_to_string(path).map_err(|source| RenderError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| RenderError::Sidecar {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
