//! Instance buffers to COCO ground truth.

mod manifest;
mod mask;

use std::collections::BTreeMap;

use image::{Rgb, RgbImage};

pub use manifest::{
    write_dataset, Annotation, CategoryRecord, DatasetManifest, ImageRecord, Provenance, ANNOTATIONS_FILE,
};
pub use mask::{decode_rle, encode_rle, mask_to_bbox, Mask, Rle};

use crate::scene::Category;

/// Instances with fewer mask pixels are left out of the annotations.
pub const MIN_ANNOTATION_PIXELS: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum AnnotateError {
    #[error("instance id {0} is not in the category map")]
    UnknownId(u32),
    #[error("mask has no set pixels")]
    EmptyMask,
    #[error("buffer has {got} values, expected {expected}")]
    BufferSize { expected: usize, got: usize },
    #[error("rle counts sum to {got}, expected {expected}")]
    RleLength { expected: u64, got: u64 },
    #[error("io error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

fn check_len(ids: &[u32], width: u32, height: u32) -> Result<(), AnnotateError> {
    let expected = width as usize * height as usize;
    if ids.len() != expected {
        return Err(AnnotateError::BufferSize { expected, got: ids.len() });
    }
    Ok(())
}

/// One mask per distinct nonzero id, ascending by id.
pub fn extract_instances(
    ids: &[u32],
    width: u32,
    height: u32,
    categories: &BTreeMap<u32, Category>,
) -> Result<Vec<(u32, Mask)>, AnnotateError> {
    check_len(ids, width, height)?;
    let mut masks: BTreeMap<u32, Mask> = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        if id == 0 {
            continue;
        }
        if !categories.contains_key(&id) {
            return Err(AnnotateError::UnknownId(id));
        }
        masks
            .entry(id)
            .or_insert_with(|| Mask::new(width, height))
            .set_index(i, true);
    }
    Ok(masks.into_iter().collect())
}

pub fn category_color(category: Category) -> [u8; 3] {
    match category {
        Category::Drone => [255, 255, 255],
        Category::Bird => [0, 0, 255],
        Category::Distractor => [0, 255, 0],
    }
}

/// Drones white, birds blue, distractors green, background black.
pub fn colorize_mask(
    ids: &[u32],
    width: u32,
    height: u32,
    categories: &BTreeMap<u32, Category>,
) -> Result<RgbImage, AnnotateError> {
    check_len(ids, width, height)?;
    let mut img = RgbImage::new(width, height);
    for (i, &id) in ids.iter().enumerate() {
        if id == 0 {
            continue;
        }
        let cat = categories.get(&id).ok_or(AnnotateError::UnknownId(id))?;
        let (x, y) = (i as u32 % width, i as u32 / width);
        img.put_pixel(x, y, Rgb(category_color(*cat)));
    }
    Ok(img)
}

/// Annotations for one rendered frame. Ids are assigned consecutively from
/// `first_annotation_id` in ascending instance-id order.
pub fn annotate_frame(
    ids: &[u32],
    width: u32,
    height: u32,
    categories: &BTreeMap<u32, Category>,
    image_id: u64,
    first_annotation_id: u64,
    min_pixels: usize,
) -> Result<Vec<Annotation>, AnnotateError> {
    let mut out = Vec::new();
    for (instance, mask) in extract_instances(ids, width, height, categories)? {
        let area = mask.count();
        if area < min_pixels.max(1) {
            continue;
        }
        let [x, y, w, h] = mask_to_bbox(&mask)?;
        out.push(Annotation {
            id: first_annotation_id + out.len() as u64,
            image_id,
            category_id: categories[&instance].id(),
            bbox: [x as f64, y as f64, w as f64, h as f64],
            area: area as f64,
            segmentation: Some(encode_rle(&mask)),
            iscrowd: 0,
        });
    }
    Ok(out)
}
