//! COCO-style detection evaluation.
//!
//! IoU thresholds 0.50:0.05:0.95, 101 recall points, at most 100 detections
//! per image and category, and the 32²/96² area regimes. Metrics that have no
//! ground truth to measure against are `None`.

mod bbox;
mod eval;
mod matching;
pub mod synthetic;

use serde::{Deserialize, Serialize};

pub use bbox::{iou, BBox};
pub use eval::{evaluate, EvalParams};
pub use matching::{average_precision, match_detections, MatchResult};

pub const MAX_DETECTIONS: usize = 100;
pub const SMALL_AREA: f64 = 1024.0;
pub const LARGE_AREA: f64 = 9216.0;

/// `0.50, 0.55, ..., 0.95`
pub fn iou_thresholds() -> [f64; 10] {
    std::array::from_fn(|i| (50 + 5 * i) as f64 / 100.0)
}

/// `0.00, 0.01, ..., 1.00`
pub fn recall_thresholds() -> [f64; 101] {
    std::array::from_fn(|i| i as f64 / 100.0)
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("degenerate box [{0}, {1}, {2}, {3}]: width and height must be positive")]
    DegenerateBox(f64, f64, f64, f64),
    #[error("detections reference image ids absent from the ground truth: {0:?}")]
    UnknownImageId(Vec<u64>),
    #[error("unknown category ids: {0:?}")]
    UnknownCategory(Vec<u32>),
}

/// One detector output record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub image_id: u64,
    pub category_id: u32,
    /// `[x, y, w, h]` in pixels.
    pub bbox: [f64; 4],
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaRegime {
    Small,
    Medium,
    Large,
}

pub fn area_regime(area: f64) -> AreaRegime {
    if area < SMALL_AREA {
        AreaRegime::Small
    } else if area < LARGE_AREA {
        AreaRegime::Medium
    } else {
        AreaRegime::Large
    }
}

/// The ten-column result row.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalResult {
    pub ap: Option<f64>,
    pub ap50: Option<f64>,
    pub ap75: Option<f64>,
    pub ap_s: Option<f64>,
    pub ap_m: Option<f64>,
    pub ap_l: Option<f64>,
    pub ar: Option<f64>,
    pub ar_s: Option<f64>,
    pub ar_m: Option<f64>,
    pub ar_l: Option<f64>,
}

impl EvalResult {
    pub const METRICS: [&'static str; 10] = ["ap", "ap50", "ap75", "ap_s", "ap_m", "ap_l", "ar", "ar_s", "ar_m", "ar_l"];
    pub const HEADERS: [&'static str; 10] = ["AP", "AP50", "AP75", "AP_S", "AP_M", "AP_L", "AR", "AR_S", "AR_M", "AR_L"];

    pub fn values(&self) -> [Option<f64>; 10] {
        [
            self.ap, self.ap50, self.ap75, self.ap_s, self.ap_m, self.ap_l, self.ar, self.ar_s, self.ar_m, self.ar_l,
        ]
    }

    pub fn get(&self, metric: &str) -> Option<Option<f64>> {
        Self::METRICS.iter().position(|&m| m == metric).map(|i| self.values()[i])
    }

    /// Aligned text table, one row per labeled result; undefined cells show `-`.
    pub fn table(rows: &[(String, EvalResult)]) -> String {
        let label_w = rows.iter().map(|(l, _)| l.len()).max().unwrap_or(0).max(5);
        let mut out = format!("{:<label_w$}", "");
        for h in Self::HEADERS {
            out.push_str(&format!(" {h:>6}"));
        }
        out.push('\n');
        for (label, r) in rows {
            out.push_str(&format!("{label:<label_w$}"));
            for v in r.values() {
                match v {
                    Some(v) => out.push_str(&format!(" {v:>6.3}")),
                    None => out.push_str(&format!(" {:>6}", "-")),
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regimes() {
        assert_eq!(area_regime(100.0), AreaRegime::Small);
        assert_eq!(area_regime(1023.9), AreaRegime::Small);
        assert_eq!(area_regime(1024.0), AreaRegime::Medium);
        assert_eq!(area_regime(9215.0), AreaRegime::Medium);
        assert_eq!(area_regime(9216.0), AreaRegime::Large);
    }

    #[test]
    fn threshold_grids() {
        let t = iou_thresholds();
        assert_eq!(t[0], 0.5);
        assert_eq!(t[5], 0.75);
        assert_eq!(t[9], 0.95);
        let r = recall_thresholds();
        assert_eq!(r.len(), 101);
        assert_eq!(r[100], 1.0);
    }

    #[test]
    fn table_marks_undefined() {
        let r = EvalResult {
            ap: Some(0.5),
            ap50: Some(0.97),
            ..Default::default()
        };
        let t = EvalResult::table(&[("run".into(), r)]);
        let line = t.lines().nth(1).unwrap();
        assert!(line.contains("0.970"));
        assert_eq!(line.matches(" -").count(), 8);
    }

    #[test]
    fn undefined_serializes_as_null() {
        let json = serde_json::to_string(&EvalResult::default()).unwrap();
        assert!(json.contains("\"ap_l\":null"));
    }
}
