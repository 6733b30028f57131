//! Stand-in detector for pipeline dry runs: ground-truth boxes perturbed by
//! seeded, bounded offsets.

use rand::Rng;

use super::Detection;
use crate::annotate::DatasetManifest;
use crate::rng::{Purpose, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jitter {
    /// Maximum shift of each edge as a fraction of the box size.
    pub max_shift: f64,
    /// Maximum relative change of width and height.
    pub max_scale: f64,
    /// Scores are drawn uniformly from `[min_score, 1]`.
    pub min_score: f64,
}

impl Default for Jitter {
    fn default() -> Self {
        Self {
            max_shift: 0.1,
            max_scale: 0.1,
            min_score: 0.5,
        }
    }
}

/// One detection per non-crowd annotation, in annotation order.
pub fn jittered_detections(gt: &DatasetManifest, seed: u64, jitter: Jitter) -> Vec<Detection> {
    gt.annotations
        .iter()
        .filter(|a| a.iscrowd == 0)
        .map(|a| {
            let mut rng = StreamKey::new(seed, 0, a.id, Purpose::DetectionJitter).rng();
            let [x, y, w, h] = a.bbox;
            let mut u = |m: f64| if m > 0.0 { rng.random_range(-m..=m) } else { 0.0 };
            let (dx, dy) = (u(jitter.max_shift) * w, u(jitter.max_shift) * h);
            let (sw, sh) = (1.0 + u(jitter.max_scale), 1.0 + u(jitter.max_scale));
            let score = if jitter.min_score < 1.0 { rng.random_range(jitter.min_score..=1.0) } else { 1.0 };
            Detection {
                image_id: a.image_id,
                category_id: a.category_id,
                bbox: [x + dx, y + dy, (w * sw).max(1e-3), (h * sh).max(1e-3)],
                score,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{Annotation, CategoryRecord, ImageRecord};
    use crate::metrics::{evaluate, EvalParams};

    fn manifest() -> DatasetManifest {
        DatasetManifest {
            provenance: None,
            images: vec![ImageRecord { id: 0, file_name: "a.png".into(), width: 640, height: 480 }],
            annotations: (0..5)
                .map(|i| Annotation {
                    id: i,
                    image_id: 0,
                    category_id: 1,
                    bbox: [i as f64 * 100.0, 50.0, 40.0, 30.0],
                    area: 1200.0,
                    segmentation: None,
                    iscrowd: 0,
                })
                .collect(),
            categories: vec![CategoryRecord { id: 1, name: "drone".into() }],
        }
    }

    #[test]
    fn zero_jitter_is_perfect() {
        let m = manifest();
        let dets = jittered_detections(&m, 1, Jitter { max_shift: 0.0, max_scale: 0.0, min_score: 1.0 });
        let r = evaluate(&m, &dets, &EvalParams::default()).unwrap();
        assert_eq!(r.ap, Some(1.0));
    }

    #[test]
    fn jitter_is_bounded_and_seeded() {
        let m = manifest();
        let j = Jitter::default();
        let a = jittered_detections(&m, 4, j);
        assert_eq!(a, jittered_detections(&m, 4, j));
        assert_ne!(a, jittered_detections(&m, 5, j));
        for (d, g) in a.iter().zip(&m.annotations) {
            assert!((d.bbox[0] - g.bbox[0]).abs() <= 0.1 * g.bbox[2] + 1e-9);
            assert!((d.bbox[2] / g.bbox[2] - 1.0).abs() <= 0.1 + 1e-9);
            assert!((0.5..=1.0).contains(&d.score));
        }
        let r = evaluate(&m, &a, &EvalParams::default()).unwrap();
        assert_eq!(r.ap50, Some(1.0));
    }
}
