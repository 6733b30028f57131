use serde::{Deserialize, Serialize};

use super::AnnotateError;

/// Binary grid, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, f: impl Fn(u32, u32) -> bool) -> Self {
        let bits = (0..height).flat_map(|y| (0..width).map(move |x| (x, y))).map(|(x, y)| f(x, y)).collect();
        Self { width, height, bits }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[(y * self.width + x) as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, v: bool) {
        self.bits[(y * self.width + x) as usize] = v;
    }

    pub fn get_index(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set_index(&mut self, i: usize, v: bool) {
        self.bits[i] = v;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// Uncompressed COCO run-length encoding: column-major runs, zeros first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rle {
    pub counts: Vec<u32>,
    /// `[height, width]`
    pub size: [u32; 2],
}

impl Rle {
    pub fn area(&self) -> u64 {
        self.counts.iter().skip(1).step_by(2).map(|&c| c as u64).sum()
    }

    /// Tight `[x, y, w, h]` box without decoding, `None` when empty.
    pub fn bbox(&self) -> Option<[u32; 4]> {
        let h = self.size[0] as u64;
        if h == 0 {
            return None;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (u64::MAX, u64::MAX, 0, 0);
        let mut pos = 0u64;
        for (k, &c) in self.counts.iter().enumerate() {
            let c = c as u64;
            if k % 2 == 1 && c > 0 {
                let (s, e) = (pos, pos + c - 1);
                let (sx, sy, ex, ey) = (s / h, s % h, e / h, e % h);
                x0 = x0.min(sx);
                x1 = x1.max(ex);
                if sx == ex {
                    y0 = y0.min(sy);
                    y1 = y1.max(ey);
                } else {
                    y0 = 0;
                    y1 = h - 1;
                }
            }
            pos += c;
        }
        (x0 != u64::MAX).then(|| [x0 as u32, y0 as u32, (x1 - x0 + 1) as u32, (y1 - y0 + 1) as u32])
    }
}

pub fn encode_rle(mask: &Mask) -> Rle {
    let mut counts = Vec::new();
    let mut current = false;
    let mut run = 0u32;
    for x in 0..mask.width {
        for y in 0..mask.height {
            let v = mask.get(x, y);
            if v != current {
                counts.push(run);
                run = 0;
                current = v;
            }
            run += 1;
        }
    }
    counts.push(run);
    Rle {
        counts,
        size: [mask.height, mask.width],
    }
}

pub fn decode_rle(rle: &Rle) -> Result<Mask, AnnotateError> {
    let [h, w] = rle.size;
    let expected = h as u64 * w as u64;
    let got: u64 = rle.counts.iter().map(|&c| c as u64).sum();
    if got != expected {
        return Err(AnnotateError::RleLength { expected, got });
    }
    let mut mask = Mask::new(w, h);
    let mut pos = 0u64;
    for (k, &c) in rle.counts.iter().enumerate() {
        if k % 2 == 1 {
            for p in pos..pos + c as u64 {
                mask.set((p / h as u64) as u32, (p % h as u64) as u32, true);
            }
        }
        pos += c as u64;
    }
    Ok(mask)
}

/// Tight `[x, y, w, h]` fit of the set pixels.
pub fn mask_to_bbox(mask: &Mask) -> Result<[u32; 4], AnnotateError> {
    let (mut x0, mut y0, mut x1, mut y1) = (u32::MAX, u32::MAX, 0, 0);
    for y in 0..mask.height {
        for x in 0..mask.width {
            if mask.get(x, y) {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
        }
    }
    if x0 == u32::MAX {
        return Err(AnnotateError::EmptyMask);
    }
    Ok([x0, y0, x1 - x0 + 1, y1 - y0 + 1])
}
