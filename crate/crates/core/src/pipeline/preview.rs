use std::path::Path;

use image::{imageops, Rgb, RgbImage};

use super::{Error, Result};
use crate::annotate::ANNOTATIONS_FILE;
use crate::coco::read_ground_truth;

/// Cell size of the contact sheet in pixels (width, height).
pub const CONTACT_SHEET_BOX: (u32, u32) = (320, 240);

const OUTLINE: Rgb<u8> = Rgb([255, 0, 0]);

fn outline(img: &mut RgbImage, x0: i64, y0: i64, x1: i64, y1: i64) {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut put = |x: i64, y: i64| {
        if (0..w).contains(&x) && (0..h).contains(&y) {
            img.put_pixel(x as u32, y as u32, OUTLINE);
        }
    };
    for x in x0..=x1 {
        put(x, y0);
        put(x, y1);
    }
    for y in y0..=y1 {
        put(x0, y);
        put(x1, y);
    }
}

/// Writes an `cells` x `cells` grid of the lowest-id images with their
/// ground-truth boxes outlined. Returns the number of images placed.
pub fn preview(dataset: &Path, out: &Path, cells: u32) -> Result<usize> {
    let cells = cells.max(1);
    let manifest = read_ground_truth(&dataset.join(ANNOTATIONS_FILE))?;
    let mut images = manifest.images.clone();
    images.sort_by_key(|i| i.id);
    images.truncate((cells * cells) as usize);
    if images.is_empty() {
        return Err(Error::io(dataset, "dataset has no images"));
    }
    let (cw, ch) = CONTACT_SHEET_BOX;
    let mut sheet = RgbImage::new(cw * cells, ch * cells);
    for (k, rec) in images.iter().enumerate() {
        let path = dataset.join(&rec.file_name);
        let img = image::open(&path).map_err(|e| Error::io(&path, e))?.to_rgb8();
        let mut cell = imageops::resize(&img, cw, ch, imageops::FilterType::Triangle);
        let (sx, sy) = (cw as f64 / img.width() as f64, ch as f64 / img.height() as f64);
        for a in manifest.annotations.iter().filter(|a| a.image_id == rec.id) {
            let [x, y, w, h] = a.bbox;
            outline(
                &mut cell,
                (x * sx).floor() as i64,
                (y * sy).floor() as i64,
                ((x + w) * sx).ceil() as i64 - 1,
                ((y + h) * sy).ceil() as i64 - 1,
            );
        }
        let k = k as u32;
        imageops::replace(&mut sheet, &cell, ((k % cells) * cw) as i64, ((k / cells) * ch) as i64);
    }
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    sheet.save(out).map_err(|e| Error::io(out, e))?;
    Ok(images.len())
}
