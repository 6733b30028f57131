use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;

use super::SceneError;
use crate::Vec3;

/// Lighting statistics gathered once per map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvStats {
    /// Texel (column, row) with the highest luminance; lowest index wins ties.
    pub brightest: (u32, u32),
    /// Mean Rec. 709 luminance over all texels.
    pub mean_luminance: f64,
}

/// Equirectangular environment map. Column 0 starts at azimuth 0 (+X) and
/// azimuth increases towards +Y; row 0 is the zenith (+Z).
///
/// Cloning is cheap: the pixel grid is shared.
#[derive(Debug, Clone)]
pub struct HdriEnvironment {
    width: u32,
    height: u32,
    pixels: Arc<Vec<[f32; 3]>>,
    stats: EnvStats,
    pub yaw_rotation: f64,
}

pub(crate) fn luminance(c: [f64; 3]) -> f64 {
    0.2126 * c[0] + 0.7152 * c[1] + 0.0722 * c[2]
}

impl HdriEnvironment {
    pub fn new(width: u32, height: u32, pixels: Vec<[f32; 3]>) -> Result<Self, SceneError> {
        if height == 0 || width != 2 * height {
            return Err(SceneError::Aspect { width, height });
        }
        assert_eq!(pixels.len(), (width * height) as usize, "pixel count must match dimensions");
        if pixels.iter().flatten().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(SceneError::NegativeRadiance);
        }
        let mut best = (0usize, f64::NEG_INFINITY);
        let mut total = 0.0;
        for (i, p) in pixels.iter().enumerate() {
            let l = luminance(p.map(f64::from));
            total += l;
            if l > best.1 {
                best = (i, l);
            }
        }
        let stats = EnvStats {
            brightest: ((best.0 as u32) % width, (best.0 as u32) / width),
            mean_luminance: total / pixels.len() as f64,
        };
        Ok(Self {
            width,
            height,
            pixels: Arc::new(pixels),
            stats,
            yaw_rotation: 0.0,
        })
    }

    /// Constant-color map.
    pub fn uniform(height: u32, color: [f32; 3]) -> Result<Self, SceneError> {
        Self::new(2 * height, height, vec![color; (2 * height * height) as usize])
    }

    /// Copy of this map rotated by `yaw` radians about +Z.
    pub fn with_yaw(&self, yaw: f64) -> Self {
        Self {
            yaw_rotation: yaw,
            ..self.clone()
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn stats(&self) -> EnvStats {
        self.stats
    }

    pub fn texel(&self, col: u32, row: u32) -> [f32; 3] {
        self.pixels[(row * self.width + col) as usize]
    }

    /// World direction through the center of texel `(col, row)`, yaw applied.
    pub fn texel_direction(&self, col: u32, row: u32) -> Vec3 {
        let u = (col as f64 + 0.5) / self.width as f64;
        let v = (row as f64 + 0.5) / self.height as f64;
        direction_from_angles(TAU * u + self.yaw_rotation, PI * v)
    }

    /// Continuous texel coordinates `(u·width, v·height)` of a direction, yaw applied.
    pub fn direction_uv(&self, dir: Vec3) -> (f64, f64) {
        let phi = dir.y.atan2(dir.x) - self.yaw_rotation;
        let u = (phi / TAU).rem_euclid(1.0);
        let theta = dir.z.clamp(-1.0, 1.0).acos();
        (u * self.width as f64, theta / PI * self.height as f64)
    }

    /// Texel containing a direction.
    pub fn direction_texel(&self, dir: Vec3) -> (u32, u32) {
        let (x, y) = self.direction_uv(dir);
        let col = (x.floor() as i64).rem_euclid(self.width as i64) as u32;
        let row = (y.floor() as i64).clamp(0, self.height as i64 - 1) as u32;
        (col, row)
    }

    /// Bilinear lookup; longitude wraps, latitude clamps at the poles.
    pub fn sample(&self, dir: Vec3) -> [f64; 3] {
        let (x, y) = self.direction_uv(dir);
        let (fx, fy) = (x - 0.5, y - 0.5);
        let (x0, y0) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - x0, fy - y0);
        let w = self.width as i64;
        let h = self.height as i64;
        let cols = [(x0 as i64).rem_euclid(w), (x0 as i64 + 1).rem_euclid(w)];
        let rows = [(y0 as i64).clamp(0, h - 1), (y0 as i64 + 1).clamp(0, h - 1)];
        let mut out = [0.0; 3];
        for (j, wy) in [(0, 1.0 - ty), (1, ty)] {
            for (i, wx) in [(0, 1.0 - tx), (1, tx)] {
                let p = self.texel(cols[i] as u32, rows[j] as u32);
                for c in 0..3 {
                    out[c] += wx * wy * f64::from(p[c]);
                }
            }
        }
        out
    }

    /// Direction of the brightest texel, yaw applied.
    pub fn light_direction(&self) -> Vec3 {
        let (c, r) = self.stats.brightest;
        self.texel_direction(c, r)
    }

    /// Deterministic sky: horizon-to-zenith gradient, darker ground, a sun
    /// disc and a handful of soft clouds.
    pub fn procedural_sky(seed: u64, height: u32) -> Self {
        let mut rng = crate::rng::seeded(seed);
        let zenith = [rng.random_range(0.15..0.45), rng.random_range(0.35..0.6), rng.random_range(0.65..0.95)];
        let horizon = [rng.random_range(0.7..0.95), rng.random_range(0.75..0.95), rng.random_range(0.8..1.0)];
        let ground = [rng.random_range(0.15..0.4), rng.random_range(0.15..0.35), rng.random_range(0.1..0.25)];
        let sun_dir = direction_from_angles(rng.random_range(0.0..TAU), rng.random_range(0.1..1.3));
        let clouds: Vec<(Vec3, f64)> = (0..rng.random_range(3..9))
            .map(|_| {
                (
                    direction_from_angles(rng.random_range(0.0..TAU), rng.random_range(0.3..1.5)),
                    rng.random_range(0.05..0.25),
                )
            })
            .collect();
        let width = 2 * height;
        let mut pixels = Vec::with_capacity((width * height) as usize);
        for row in 0..height {
            for col in 0..width {
                let theta = PI * (row as f64 + 0.5) / height as f64;
                let phi = TAU * (col as f64 + 0.5) / width as f64;
                let d = direction_from_angles(phi, theta);
                let mut c = if d.z >= 0.0 {
                    let t = d.z.powf(0.6);
                    [0, 1, 2].map(|i| horizon[i] * (1.0 - t) + zenith[i] * t)
                } else {
                    ground
                };
                if d.z > 0.0 {
                    for (cd, size) in &clouds {
                        let cos = d.dot(*cd);
                        let a = ((cos - size.cos()) / (1.0 - size.cos())).clamp(0.0, 1.0);
                        for ch in &mut c {
                            *ch = *ch * (1.0 - 0.7 * a) + 0.7 * a;
                        }
                    }
                }
                let sun = ((d.dot(sun_dir) - 0.9995) / 0.0005).clamp(0.0, 1.0);
                let glow = d.dot(sun_dir).max(0.0).powi(64) * 0.3;
                pixels.push(c.map(|ch| (ch + glow + sun).min(1.0) as f32));
            }
        }
        Self::new(width, height, pixels).expect("procedural sky has valid aspect")
    }
}

fn direction_from_angles(phi: f64, theta: f64) -> Vec3 {
    Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

/// Loads an 8- or 16-bit RGB(A) image as an environment map with zero yaw.
pub fn load_hdri(path: impl AsRef<Path>) -> Result<HdriEnvironment, SceneError> {
    let path = path.as_ref();
    if !path.exists() {
        return Err(SceneError::FileNotFound(path.to_path_buf()));
    }
    let img = image::open(path).map_err(|e| SceneError::Decode {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let rgb = img.to_rgb32f();
    let (w, h) = rgb.dimensions();
    let pixels = rgb.pixels().map(|p| p.0).collect();
    HdriEnvironment::new(w, h, pixels)
}
