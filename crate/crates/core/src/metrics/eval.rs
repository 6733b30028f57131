use std::collections::{BTreeMap, BTreeSet};

use super::matching::{greedy_match, interpolated_ap, pr_curve, score_order, truncate, GtEntry};
use super::{iou_thresholds, BBox, Detection, EvalResult, MetricsError, LARGE_AREA, SMALL_AREA};
use crate::annotate::{Annotation, DatasetManifest};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalParams {
    /// Categories to score; all ground-truth categories when `None`.
    pub category_ids: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy)]
struct AreaRange(f64, f64);

impl AreaRange {
    fn contains(&self, a: f64) -> bool {
        a >= self.0 && a < self.1
    }
}

const RANGES: [AreaRange; 4] = [
    AreaRange(0.0, f64::INFINITY),
    AreaRange(0.0, SMALL_AREA),
    AreaRange(SMALL_AREA, LARGE_AREA),
    AreaRange(LARGE_AREA, f64::INFINITY),
];

type Cell<'a> = (Vec<&'a Annotation>, Vec<&'a Detection>);

/// Per-threshold AP and final recall for one category and area range.
struct Curve {
    ap: [f64; 10],
    recall: [f64; 10],
}

fn evaluate_cell(cells: &[&Cell<'_>], range: AreaRange) -> Option<Curve> {
    let thresholds = iou_thresholds();
    // (score, tp) in image order, per threshold.
    let mut scored: Vec<Vec<(f64, bool)>> = vec![Vec::new(); thresholds.len()];
    let mut positives = 0usize;
    for (anns, dets) in cells {
        let mut gts: Vec<GtEntry> = anns
            .iter()
            .map(|a| GtEntry {
                bbox: BBox::from_xywh(a.bbox),
                ignore: a.iscrowd != 0 || !range.contains(a.area),
                crowd: a.iscrowd != 0,
            })
            .collect();
        gts.sort_by_key(|g| g.ignore);
        positives += gts.iter().filter(|g| !g.ignore).count();
        let mut order = score_order(dets);
        truncate(&mut order);
        for (t, &thr) in thresholds.iter().enumerate() {
            let (matched, _) = greedy_match(dets, &order, &gts, thr);
            for &d in &order {
                let ignored = match matched[d] {
                    Some(g) => gts[g].ignore,
                    None => !range.contains(BBox::from_xywh(dets[d].bbox).area()),
                };
                if !ignored {
                    scored[t].push((dets[d].score, matched[d].is_some()));
                }
            }
        }
    }
    if positives == 0 {
        return None;
    }
    let mut curve = Curve {
        ap: [0.0; 10],
        recall: [0.0; 10],
    };
    for (t, list) in scored.iter_mut().enumerate() {
        list.sort_by(|a, b| b.0.total_cmp(&a.0));
        let tps: Vec<bool> = list.iter().map(|&(_, tp)| tp).collect();
        let (precision, recall) = pr_curve(&tps, positives)?;
        curve.ap[t] = interpolated_ap(&precision, &recall);
        curve.recall[t] = recall.last().copied().unwrap_or(0.0);
    }
    Some(curve)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

/// Scores `detections` against `ground_truth`.
pub fn evaluate(ground_truth: &DatasetManifest, detections: &[Detection], params: &EvalParams) -> Result<EvalResult, MetricsError> {
    let image_ids: BTreeSet<u64> = ground_truth.images.iter().map(|i| i.id).collect();
    let unknown: BTreeSet<u64> = detections
        .iter()
        .map(|d| d.image_id)
        .filter(|id| !image_ids.contains(id))
        .collect();
    if !unknown.is_empty() {
        return Err(MetricsError::UnknownImageId(unknown.into_iter().collect()));
    }
    let known_cats: BTreeSet<u32> = ground_truth.categories.iter().map(|c| c.id).collect();
    let requested: Vec<u32> = params.category_ids.clone().unwrap_or_else(|| known_cats.iter().copied().collect());
    let unknown: BTreeSet<u32> = detections
        .iter()
        .map(|d| d.category_id)
        .chain(requested.iter().copied())
        .filter(|c| !known_cats.contains(c))
        .collect();
    if !unknown.is_empty() {
        return Err(MetricsError::UnknownCategory(unknown.into_iter().collect()));
    }
    for d in detections {
        let [x, y, w, h] = d.bbox;
        BBox::new(x, y, w, h)?;
    }

    let cat_set: BTreeSet<u32> = requested.iter().copied().collect();
    let mut cells: BTreeMap<(u32, u64), Cell<'_>> = BTreeMap::new();
    for a in &ground_truth.annotations {
        if cat_set.contains(&a.category_id) {
            cells.entry((a.category_id, a.image_id)).or_default().0.push(a);
        }
    }
    for d in detections {
        if cat_set.contains(&d.category_id) {
            cells.entry((d.category_id, d.image_id)).or_default().1.push(d);
        }
    }

    // curves[range][category]
    let mut curves: Vec<Vec<Curve>> = RANGES.iter().map(|_| Vec::new()).collect();
    for &cat in &cat_set {
        let per_image: Vec<&Cell<'_>> = cells.range((cat, 0)..=(cat, u64::MAX)).map(|(_, c)| c).collect();
        for (r, range) in RANGES.iter().enumerate() {
            if let Some(c) = evaluate_cell(&per_image, *range) {
                curves[r].push(c);
            }
        }
    }
    let ap = |r: usize| mean(curves[r].iter().flat_map(|c| c.ap.into_iter()));
    let ar = |r: usize| mean(curves[r].iter().flat_map(|c| c.recall.into_iter()));
    Ok(EvalResult {
        ap: ap(0),
        ap50: mean(curves[0].iter().map(|c| c.ap[0])),
        ap75: mean(curves[0].iter().map(|c| c.ap[5])),
        ap_s: ap(1),
        ap_m: ap(2),
        ap_l: ap(3),
        ar: ar(0),
        ar_s: ar(1),
        ar_m: ar(2),
        ar_l: ar(3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{CategoryRecord, ImageRecord};

    fn gt(boxes: &[(u64, [f64; 4])]) -> DatasetManifest {
        let images: BTreeSet<u64> = boxes.iter().map(|b| b.0).collect();
        DatasetManifest {
            provenance: None,
            images: images
                .into_iter()
                .chain([99])
                .map(|id| ImageRecord {
                    id,
                    file_name: format!("{id}.png"),
                    width: 640,
                    height: 480,
                })
                .collect(),
            annotations: boxes
                .iter()
                .enumerate()
                .map(|(i, &(image_id, bbox))| Annotation {
                    id: i as u64,
                    image_id,
                    category_id: 1,
                    bbox,
                    area: bbox[2] * bbox[3],
                    segmentation: None,
                    iscrowd: 0,
                })
                .collect(),
            categories: vec![CategoryRecord {
                id: 1,
                name: "drone".into(),
            }],
        }
    }

    fn perfect(m: &DatasetManifest) -> Vec<Detection> {
        m.annotations
            .iter()
            .map(|a| Detection {
                image_id: a.image_id,
                category_id: a.category_id,
                bbox: a.bbox,
                score: 1.0,
            })
            .collect()
    }

    #[test]
    fn perfect_predictions_score_one() {
        let m = gt(&[(0, [10.0, 10.0, 20.0, 20.0]), (0, [100.0, 100.0, 50.0, 40.0]), (1, [0.0, 0.0, 200.0, 100.0])]);
        let r = evaluate(&m, &perfect(&m), &EvalParams::default()).unwrap();
        for v in r.values() {
            assert_eq!(v, Some(1.0));
        }
    }

    #[test]
    fn undefined_regime_is_none() {
        let m = gt(&[(0, [10.0, 10.0, 20.0, 20.0])]);
        let r = evaluate(&m, &perfect(&m), &EvalParams::default()).unwrap();
        assert_eq!(r.ap_s, Some(1.0));
        assert_eq!(r.ap_m, None);
        assert_eq!(r.ap_l, None);
        assert_eq!(r.ar_l, None);
    }

    #[test]
    fn empty_predictions_score_zero() {
        let m = gt(&[(0, [10.0, 10.0, 20.0, 20.0])]);
        let r = evaluate(&m, &[], &EvalParams::default()).unwrap();
        assert_eq!(r.ap, Some(0.0));
        assert_eq!(r.ap50, Some(0.0));
        assert_eq!(r.ar, Some(0.0));
    }

    #[test]
    fn false_positive_before_true_positive() {
        let m = gt(&[(0, [0.0, 0.0, 10.0, 10.0]), (0, [100.0, 0.0, 10.0, 10.0])]);
        let dets = vec![
            Detection { image_id: 0, category_id: 1, bbox: [300.0, 300.0, 10.0, 10.0], score: 0.9 },
            Detection { image_id: 0, category_id: 1, bbox: [0.0, 0.0, 10.0, 10.0], score: 0.8 },
        ];
        let r = evaluate(&m, &dets, &EvalParams::default()).unwrap();
        assert!((r.ap50.unwrap() - 51.0 / 101.0 * 0.5).abs() < 1e-12);
        assert!((r.ar.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unknown_image_ids_listed() {
        let m = gt(&[(0, [0.0, 0.0, 10.0, 10.0])]);
        let d = |image_id| Detection { image_id, category_id: 1, bbox: [0.0, 0.0, 1.0, 1.0], score: 0.5 };
        assert_eq!(
            evaluate(&m, &[d(7), d(0), d(3), d(7)], &EvalParams::default()),
            Err(MetricsError::UnknownImageId(vec![3, 7]))
        );
    }

    #[test]
    fn unknown_category_rejected() {
        let m = gt(&[(0, [0.0, 0.0, 10.0, 10.0])]);
        let d = Detection { image_id: 0, category_id: 4, bbox: [0.0, 0.0, 1.0, 1.0], score: 0.5 };
        assert_eq!(evaluate(&m, &[d], &EvalParams::default()), Err(MetricsError::UnknownCategory(vec![4])));
        let params = EvalParams { category_ids: Some(vec![2]) };
        assert_eq!(evaluate(&m, &[], &params), Err(MetricsError::UnknownCategory(vec![2])));
    }

    #[test]
    fn crowd_region_absorbs_detections() {
        let mut m = gt(&[(0, [0.0, 0.0, 100.0, 100.0]), (0, [200.0, 200.0, 20.0, 20.0])]);
        m.annotations[0].iscrowd = 1;
        let d = |x, s| Detection { image_id: 0, category_id: 1, bbox: [x, 10.0, 20.0, 20.0], score: s };
        let dets = vec![d(10.0, 0.9), d(50.0, 0.8), Detection { bbox: [200.0, 200.0, 20.0, 20.0], ..d(0.0, 0.7) }];
        let r = evaluate(&m, &dets, &EvalParams::default()).unwrap();
        assert_eq!(r.ap, Some(1.0));
    }
}
