//! Offline JPEG re-compression and additive Gaussian noise.

mod apply;

use std::collections::BTreeSet;
use std::io::Cursor;

use image::codecs::jpeg::JpegEncoder;
use image::RgbImage;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use apply::{apply_plan, plan_report, AugmentError, AugmentationReport, ReportEntry, REPORT_FILE};

use crate::rng::{Purpose, StreamKey};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentationPlan {
    pub jpeg_enabled: bool,
    pub noise_enabled: bool,
    pub subset_fraction: f64,
    /// Inclusive JPEG quality range.
    pub quality_range: [u8; 2],
    /// Noise standard deviation range in 8-bit intensity units.
    pub noise_sigma_range: [f64; 2],
    pub seed: u64,
}

impl Default for AugmentationPlan {
    fn default() -> Self {
        Self {
            jpeg_enabled: true,
            noise_enabled: true,
            subset_fraction: 0.5,
            quality_range: [0, 95],
            noise_sigma_range: [0.0, 12.75],
            seed: 0,
        }
    }
}

impl AugmentationPlan {
    pub fn none() -> Self {
        Self {
            jpeg_enabled: false,
            noise_enabled: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.subset_fraction) {
            return Err(format!("subset_fraction {} outside [0, 1]", self.subset_fraction));
        }
        let [q0, q1] = self.quality_range;
        if q0 > q1 || q1 > 100 {
            return Err(format!("quality_range [{q0}, {q1}] must be ordered within [0, 100]"));
        }
        let [s0, s1] = self.noise_sigma_range;
        if !(s0.is_finite() && s1.is_finite() && 0.0 <= s0 && s0 <= s1) {
            return Err(format!("noise_sigma_range [{s0}, {s1}] must be ordered and non-negative"));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self, String> {
        let plan: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    /// Quality and sigma for one image; both are drawn whatever the flags.
    pub fn draw_parameters(&self, image_id: u64) -> (u8, f64) {
        let mut rng = StreamKey::new(self.seed, 0, image_id, Purpose::AugmentParams).rng();
        let quality = rng.random_range(self.quality_range[0]..=self.quality_range[1]);
        let [s0, s1] = self.noise_sigma_range;
        let sigma = if s1 > s0 { rng.random_range(s0..=s1) } else { s0 };
        (quality, sigma)
    }
}

/// `floor(fraction · N)` ids chosen by a seeded shuffle.
pub fn select_subset(seed: u64, image_ids: &[u64], fraction: f64) -> BTreeSet<u64> {
    assert!((0.0..=1.0).contains(&fraction), "fraction {fraction} outside [0, 1]");
    let mut ids: Vec<u64> = image_ids.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let k = (fraction * ids.len() as f64).floor() as usize;
    let mut rng = StreamKey::new(seed, 0, 0, Purpose::AugmentSubset).rng();
    ids.shuffle(&mut rng);
    ids.into_iter().take(k).collect()
}

/// Baseline JPEG bytes. The encoder's lowest setting is 1, so 0 encodes as 1.
pub fn encode_jpeg(img: &RgbImage, quality: u8) -> Vec<u8> {
    let mut buf = Vec::new();
    JpegEncoder::new_with_quality(&mut Cursor::new(&mut buf), quality.clamp(1, 100))
        .encode_image(img)
        .expect("in-memory jpeg encode");
    buf
}

/// Encode at `quality`, then decode.
pub fn jpeg_compress(img: &RgbImage, quality: u8) -> RgbImage {
    image::load_from_memory_with_format(&encode_jpeg(img, quality), image::ImageFormat::Jpeg)
        .expect("decode of freshly encoded jpeg")
        .to_rgb8()
}

/// Adds independent `N(0, σ²)` noise to every channel, rounded and clamped.
pub fn add_gaussian_noise(img: &RgbImage, sigma: f64, seed: u64, image_id: u64) -> RgbImage {
    assert!(sigma >= 0.0 && sigma.is_finite(), "sigma {sigma}");
    if sigma == 0.0 {
        return img.clone();
    }
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    let mut rng = StreamKey::new(seed, 0, image_id, Purpose::Noise).rng();
    let mut out = img.clone();
    for v in out.iter_mut() {
        *v = (*v as f64 + normal.sample(&mut rng)).round().clamp(0.0, 255.0) as u8;
    }
    out
}

#[cfg(test)]
mod tests {
    use image::Rgb;
    use rand::RngCore;

    use super::*;

    fn random_image(w: u32, h: u32, seed: u64) -> RgbImage {
        let mut rng = crate::rng::seeded(seed);
        RgbImage::from_fn(w, h, |_, _| {
            let v = rng.next_u32().to_le_bytes();
            Rgb([v[0], v[1], v[2]])
        })
    }

    #[test]
    fn subset_sizes() {
        let ids: Vec<u64> = (0..10).collect();
        assert!(select_subset(1, &ids, 0.0).is_empty());
        assert_eq!(select_subset(1, &ids, 1.0).len(), 10);
        let half = select_subset(1, &ids, 0.5);
        assert_eq!(half.len(), 5);
        assert_eq!(half, select_subset(1, &ids, 0.5));
        let ids: Vec<u64> = (0..101).collect();
        assert_eq!(select_subset(9, &ids, 0.5).len(), 50);
    }

    #[test]
    fn jpeg_high_quality_constant_image() {
        let img = RgbImage::from_pixel(64, 48, Rgb([120, 64, 200]));
        let out = jpeg_compress(&img, 95);
        assert_eq!(out.dimensions(), (64, 48));
        let max_dev = img.iter().zip(out.iter()).map(|(a, b)| (*a as i32 - *b as i32).abs()).max().unwrap();
        assert!(max_dev <= 2, "deviation {max_dev}");
    }

    #[test]
    fn jpeg_low_quality_is_worse() {
        let img = random_image(64, 64, 3);
        let mae = |q| {
            let out = jpeg_compress(&img, q);
            img.iter().zip(out.iter()).map(|(a, b)| (*a as f64 - *b as f64).abs()).sum::<f64>() / img.len() as f64
        };
        assert!(mae(0) > mae(95));
    }

    #[test]
    fn jpeg_keeps_odd_dimensions() {
        let img = random_image(17, 5, 4);
        assert_eq!(jpeg_compress(&img, 50).dimensions(), (17, 5));
    }

    #[test]
    fn zero_noise_is_identity() {
        let img = random_image(16, 16, 5);
        assert_eq!(add_gaussian_noise(&img, 0.0, 1, 1), img);
    }

    #[test]
    fn noise_has_requested_spread() {
        let img = RgbImage::from_pixel(256, 256, Rgb([128, 128, 128]));
        let out = add_gaussian_noise(&img, 10.0, 7, 3);
        let d: Vec<f64> = img.iter().zip(out.iter()).map(|(a, b)| *b as f64 - *a as f64).collect();
        let m = d.iter().sum::<f64>() / d.len() as f64;
        let sd = (d.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (d.len() - 1) as f64).sqrt();
        assert!((9.0..=11.0).contains(&sd), "sd {sd}");
        assert_eq!(out, add_gaussian_noise(&img, 10.0, 7, 3));
        assert_ne!(out, add_gaussian_noise(&img, 10.0, 7, 4));
    }

    #[test]
    fn plan_defaults_and_round_trip() {
        let p = AugmentationPlan::default();
        assert!(p.jpeg_enabled && p.noise_enabled);
        assert_eq!(p.subset_fraction, 0.5);
        assert_eq!(AugmentationPlan::from_json_str(&p.to_json_pretty()).unwrap(), p);
        assert_eq!(AugmentationPlan::from_json_str("{}").unwrap(), p);
        assert!(AugmentationPlan::from_json_str(r#"{"subset_fraction": 1.5}"#).is_err());
        assert!(AugmentationPlan::from_json_str(r#"{"quality": 3}"#).is_err());
    }

    #[test]
    fn quality_draws_are_uniform() {
        let plan = AugmentationPlan::default();
        let draws: Vec<u8> = (0..1000).map(|i| plan.draw_parameters(i).0).collect();
        assert!(draws.iter().all(|&q| q <= 95));
        // Ten bins over the 96 integer qualities; expected counts follow bin widths.
        let bin = |q: u8| (q as usize * 10) / 96;
        let mut observed = [0f64; 10];
        let mut width = [0f64; 10];
        for q in 0..=95u8 {
            width[bin(q)] += 1.0;
        }
        for &q in &draws {
            observed[bin(q)] += 1.0;
        }
        let chi2: f64 = (0..10).map(|b| {
            let e = 1000.0 * width[b] / 96.0;
            (observed[b] - e).powi(2) / e
        }).sum();
        // 99th percentile of chi-square with 9 degrees of freedom.
        assert!(chi2 < 21.666, "chi2 {chi2}");
    }
}
