use image::{Rgb, RgbImage};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{Purpose, StreamKey, StreamRng};

pub const PALETTE_SIZE: [usize; 2] = [3, 6];
pub const SHAPE_COUNT: [usize; 2] = [5, 50];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlendMode {
    Normal,
    Multiply,
    Screen,
    Overlay,
}

impl BlendMode {
    pub const ALL: [BlendMode; 4] = [BlendMode::Normal, BlendMode::Multiply, BlendMode::Screen, BlendMode::Overlay];

    /// Blends source `s` over backdrop `b`, both in `[0, 1]`.
    pub fn apply(self, b: f64, s: f64) -> f64 {
        match self {
            BlendMode::Normal => s,
            BlendMode::Multiply => b * s,
            BlendMode::Screen => 1.0 - (1.0 - b) * (1.0 - s),
            BlendMode::Overlay => {
                if b < 0.5 {
                    2.0 * b * s
                } else {
                    1.0 - 2.0 * (1.0 - b) * (1.0 - s)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Ellipse { cx: f64, cy: f64, rx: f64, ry: f64 },
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    Triangle([(f64, f64); 3]),
}

impl Shape {
    fn bounds(&self) -> (f64, f64, f64, f64) {
        match *self {
            Shape::Ellipse { cx, cy, rx, ry } => (cx - rx, cy - ry, cx + rx, cy + ry),
            Shape::Rect { x0, y0, x1, y1 } => (x0, y0, x1, y1),
            Shape::Triangle(p) => (
                p.iter().map(|q| q.0).fold(f64::INFINITY, f64::min),
                p.iter().map(|q| q.1).fold(f64::INFINITY, f64::min),
                p.iter().map(|q| q.0).fold(f64::NEG_INFINITY, f64::max),
                p.iter().map(|q| q.1).fold(f64::NEG_INFINITY, f64::max),
            ),
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Ellipse { cx, cy, rx, ry } => {
                let (dx, dy) = ((x - cx) / rx, (y - cy) / ry);
                dx * dx + dy * dy <= 1.0
            }
            Shape::Rect { x0, y0, x1, y1 } => x >= x0 && x <= x1 && y >= y0 && y <= y1,
            Shape::Triangle([a, b, c]) => {
                let e = |p: (f64, f64), q: (f64, f64)| (q.0 - p.0) * (y - p.1) - (q.1 - p.1) * (x - p.0);
                let (d0, d1, d2) = (e(a, b), e(b, c), e(c, a));
                (d0 >= 0.0 && d1 >= 0.0 && d2 >= 0.0) || (d0 <= 0.0 && d1 <= 0.0 && d2 <= 0.0)
            }
        }
    }
}

fn random_shape(rng: &mut StreamRng, w: f64, h: f64) -> Shape {
    let cx = rng.random_range(0.0..w);
    let cy = rng.random_range(0.0..h);
    let scale = w.max(h);
    let extent = |rng: &mut StreamRng| rng.random_range(0.05..0.5) * scale;
    match rng.random_range(0..3) {
        0 => Shape::Ellipse {
            cx,
            cy,
            rx: extent(rng).max(0.5),
            ry: extent(rng).max(0.5),
        },
        1 => {
            let (ex, ey) = (extent(rng).max(0.5), extent(rng).max(0.5));
            Shape::Rect {
                x0: cx - ex,
                y0: cy - ey,
                x1: cx + ex,
                y1: cy + ey,
            }
        }
        _ => {
            let r = rng.random_range(0.05..0.5) * scale;
            Shape::Triangle(std::array::from_fn(|_| {
                (cx + rng.random_range(-r..=r), cy + rng.random_range(-r..=r))
            }))
        }
    }
}

/// Unrealistic background: a base fill from a random palette of 3 to 6
/// colors overlaid with 5 to 50 ellipses, rectangles and triangles, each
/// composited with a random blend mode. Deterministic per `(seed, frame)`.
pub fn synthesize_random_background(master_seed: u64, frame_index: u64, width: u32, height: u32) -> RgbImage {
    let mut rng = StreamKey::new(master_seed, 0, frame_index, Purpose::Background).rng();
    let n_colors = rng.random_range(PALETTE_SIZE[0]..=PALETTE_SIZE[1]);
    let palette: Vec<[f64; 3]> = (0..n_colors).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
    let (w, h) = (width as usize, height as usize);
    let mut buf: Vec<[f64; 3]> = vec![palette[0]; w * h];

    let n_shapes = rng.random_range(SHAPE_COUNT[0]..=SHAPE_COUNT[1]);
    for _ in 0..n_shapes {
        let shape = random_shape(&mut rng, width as f64, height as f64);
        let color = palette[rng.random_range(0..palette.len())];
        let mode = BlendMode::ALL[rng.random_range(0..BlendMode::ALL.len())];
        let (x0, y0, x1, y1) = shape.bounds();
        let cols = (x0.floor().max(0.0) as usize)..((x1.ceil().max(0.0) as usize).min(w));
        let rows = (y0.floor().max(0.0) as usize)..((y1.ceil().max(0.0) as usize).min(h));
        for r in rows {
            for c in cols.clone() {
                if shape.contains(c as f64 + 0.5, r as f64 + 0.5) {
                    let px = &mut buf[r * w + c];
                    for k in 0..3 {
                        px[k] = mode.apply(px[k], color[k]).clamp(0.0, 1.0);
                    }
                }
            }
        }
    }

    RgbImage::from_fn(width, height, |x, y| {
        let p = buf[y as usize * w + x as usize];
        Rgb(p.map(|v| (v * 255.0).round() as u8))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn bit_identical_per_key() {
        let a = synthesize_random_background(1, 7, 64, 48);
        assert_eq!(a, synthesize_random_background(1, 7, 64, 48));
        assert_ne!(a, synthesize_random_background(1, 8, 64, 48));
    }

    #[test]
    fn has_several_colors() {
        for frame in 0..50 {
            let img = synthesize_random_background(42, frame, 160, 120);
            let distinct: HashSet<[u8; 3]> = img.pixels().map(|p| p.0).collect();
            assert!(distinct.len() >= 2, "frame {frame}");
        }
    }

    #[test]
    fn one_pixel() {
        let img = synthesize_random_background(3, 0, 1, 1);
        assert_eq!(img.dimensions(), (1, 1));
    }

    #[test]
    fn blend_modes() {
        assert_eq!(BlendMode::Normal.apply(0.2, 0.7), 0.7);
        assert!((BlendMode::Multiply.apply(0.5, 0.5) - 0.25).abs() < 1e-12);
        assert!((BlendMode::Screen.apply(0.5, 0.5) - 0.75).abs() < 1e-12);
        assert!((BlendMode::Overlay.apply(0.25, 0.5) - 0.25).abs() < 1e-12);
        assert!((BlendMode::Overlay.apply(0.75, 0.5) - 0.75).abs() < 1e-12);
    }
}
