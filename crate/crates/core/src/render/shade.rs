use crate::randomizer::Background;
use crate::scene::{Color, HdriEnvironment};
use crate::Vec3;

/// Gain of the directional term.
pub const DIFFUSE_GAIN: f64 = 0.8;

/// Single directional light plus ambient term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lighting {
    /// Unit vector towards the light.
    pub direction: Vec3,
    pub ambient: f64,
    pub gain: f64,
}

impl Lighting {
    /// Light from the brightest texel, ambient from the mean luminance.
    pub fn from_environment(env: &HdriEnvironment) -> Self {
        Self {
            direction: env.light_direction(),
            ambient: env.stats().mean_luminance,
            gain: DIFFUSE_GAIN,
        }
    }

    /// Flat backgrounds light from high in the sky with ambient equal to the
    /// image's mean luminance.
    pub fn from_image(img: &image::RgbImage) -> Self {
        let n = (img.width() * img.height()).max(1) as f64;
        let total: f64 = img
            .pixels()
            .map(|p| crate::scene::luminance_u8(p.0))
            .sum();
        Self {
            direction: Vec3::new(0.3, 0.2, 0.93).normalize(),
            ambient: total / n,
            gain: DIFFUSE_GAIN,
        }
    }

    pub fn for_background(bg: &Background) -> Self {
        match bg {
            Background::Hdri(env) => Self::from_environment(env),
            Background::Image(img) => Self::from_image(img),
        }
    }
}

/// Lambertian shading: `base · (ambient + gain · max(0, n·L))`, clamped to `[0, 1]`.
pub fn shade(normal: Vec3, base_color: Color, lighting: &Lighting) -> Color {
    let k = lighting.ambient + lighting.gain * normal.dot(lighting.direction).max(0.0);
    base_color.map(|c| (c * k).clamp(0.0, 1.0))
}

/// Bilinear equirectangular lookup along a unit direction, yaw applied.
pub fn sample_environment(direction: Vec3, env: &HdriEnvironment) -> Color {
    env.sample(direction)
}
