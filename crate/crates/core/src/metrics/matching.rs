use super::{BBox, Detection, MAX_DETECTIONS};

/// Greedy assignment for one image and category at one IoU threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    /// Detection indices in descending score order (stable on ties).
    pub order: Vec<usize>,
    /// Per input detection: matched GT index.
    pub det_match: Vec<Option<usize>>,
    /// Per input detection: excluded from the precision-recall curve.
    pub det_ignored: Vec<bool>,
    /// Per GT: whether some detection matched it.
    pub gt_matched: Vec<bool>,
}

impl MatchResult {
    pub fn is_true_positive(&self, det: usize) -> bool {
        self.det_match[det].is_some() && !self.det_ignored[det]
    }
}

/// Ground-truth box as seen by the matcher.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GtEntry {
    pub bbox: BBox<f64>,
    pub ignore: bool,
    pub crowd: bool,
}

/// Stable descending-score order.
pub(crate) fn score_order(dets: &[&Detection]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score.total_cmp(&dets[a].score));
    order
}

/// IoU, or intersection over detection area for crowd regions.
pub(crate) fn overlap(det: &BBox<f64>, gt: &GtEntry) -> f64 {
    if gt.crowd {
        let a = det.area();
        if a <= 0.0 {
            0.0
        } else {
            det.intersection(&gt.bbox) / a
        }
    } else {
        det.iou_unchecked(&gt.bbox)
    }
}

/// Core matcher. `gts` must list non-ignored entries first. Each detection,
/// in score order, takes the unmatched GT with the highest overlap at or above
/// `threshold`; overlap ties go to the lower GT index, and an ignored GT is
/// only taken when no regular GT qualifies. Crowd GTs can absorb any number
/// of detections.
pub(crate) fn greedy_match(dets: &[&Detection], order: &[usize], gts: &[GtEntry], threshold: f64) -> (Vec<Option<usize>>, Vec<bool>) {
    let mut det_match = vec![None; dets.len()];
    let mut gt_taken = vec![false; gts.len()];
    for &d in order {
        let db = BBox::from_xywh(dets[d].bbox);
        let mut best: Option<(usize, f64)> = None;
        for (g, gt) in gts.iter().enumerate() {
            if gt_taken[g] && !gt.crowd {
                continue;
            }
            if let Some((m, _)) = best {
                if !gts[m].ignore && gt.ignore {
                    break;
                }
            }
            let o = overlap(&db, gt);
            if o < threshold {
                continue;
            }
            if let Some((_, b)) = best {
                if o <= b {
                    continue;
                }
            }
            best = Some((g, o));
        }
        if let Some((g, _)) = best {
            gt_taken[g] = true;
            det_match[d] = Some(g);
        }
    }
    (det_match, gt_taken)
}

/// Greedy matching of one image's detections against its ground truths.
pub fn match_detections(detections: &[Detection], ground_truths: &[BBox<f64>], iou_threshold: f64) -> MatchResult {
    let dets: Vec<&Detection> = detections.iter().collect();
    let order = score_order(&dets);
    let gts: Vec<GtEntry> = ground_truths
        .iter()
        .map(|&bbox| GtEntry {
            bbox,
            ignore: false,
            crowd: false,
        })
        .collect();
    let (det_match, gt_matched) = greedy_match(&dets, &order, &gts, iou_threshold);
    MatchResult {
        order,
        det_ignored: vec![false; detections.len()],
        det_match,
        gt_matched,
    }
}

/// 101-point interpolated AP from TP flags in descending score order.
/// `None` when there is no ground truth.
pub fn average_precision(tp_in_score_order: &[bool], gt_count: usize) -> Option<f64> {
    let (precision, recall) = pr_curve(tp_in_score_order, gt_count)?;
    Some(interpolated_ap(&precision, &recall))
}

pub(crate) fn pr_curve(tps: &[bool], gt_count: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    if gt_count == 0 {
        return None;
    }
    let mut tp = 0usize;
    let mut precision = Vec::with_capacity(tps.len());
    let mut recall = Vec::with_capacity(tps.len());
    for (i, &t) in tps.iter().enumerate() {
        tp += t as usize;
        precision.push(tp as f64 / (i + 1) as f64);
        recall.push(tp as f64 / gt_count as f64);
    }
    Some((precision, recall))
}

/// Mean over the 101 recall points of the precision envelope, sampled at the
/// first curve point whose recall reaches each threshold.
pub(crate) fn interpolated_ap(precision: &[f64], recall: &[f64]) -> f64 {
    let mut env = precision.to_vec();
    for i in (1..env.len()).rev() {
        if env[i] > env[i - 1] {
            env[i - 1] = env[i];
        }
    }
    let mut sum = 0.0;
    let mut j = 0;
    for r in super::recall_thresholds() {
        while j < recall.len() && recall[j] < r {
            j += 1;
        }
        if j < recall.len() {
            sum += env[j];
        }
    }
    sum / 101.0
}

pub(crate) fn truncate(order: &mut Vec<usize>) {
    order.truncate(MAX_DETECTIONS);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(x: f64, score: f64) -> Detection {
        Detection {
            image_id: 0,
            category_id: 1,
            bbox: [x, 0.0, 10.0, 10.0],
            score,
        }
    }

    fn gt(x: f64) -> BBox<f64> {
        BBox::from_xywh([x, 0.0, 10.0, 10.0])
    }

    #[test]
    fn single_match_above_threshold() {
        // Shift of 2.5 px: IoU = 75 / 125 = 0.6.
        let m = match_detections(&[det(2.5, 0.9)], &[gt(0.0)], 0.5);
        assert!(m.is_true_positive(0));
        assert_eq!(m.gt_matched, vec![true]);
    }

    #[test]
    fn single_match_below_threshold() {
        // Shift of 4.3 px: IoU = 57 / 143 ≈ 0.4.
        let m = match_detections(&[det(4.3, 0.9)], &[gt(0.0)], 0.5);
        assert!(!m.is_true_positive(0));
        assert_eq!(m.gt_matched, vec![false]);
    }

    #[test]
    fn higher_score_wins() {
        let m = match_detections(&[det(1.0, 0.3), det(2.0, 0.8)], &[gt(0.0)], 0.5);
        assert_eq!(m.order, vec![1, 0]);
        assert!(m.is_true_positive(1));
        assert!(!m.is_true_positive(0));
    }

    #[test]
    fn score_ties_keep_input_order() {
        let m = match_detections(&[det(1.0, 0.5), det(0.0, 0.5)], &[gt(0.0)], 0.5);
        assert_eq!(m.order, vec![0, 1]);
        assert!(m.is_true_positive(0));
    }

    #[test]
    fn iou_ties_go_to_lower_gt() {
        let m = match_detections(&[det(5.0, 0.9)], &[gt(0.0), gt(10.0), gt(5.0)], 0.3);
        assert_eq!(m.det_match[0], Some(2));
        let m = match_detections(&[det(5.0, 0.9)], &[gt(0.0), gt(10.0)], 0.3);
        assert_eq!(m.det_match[0], Some(0));
    }

    #[test]
    fn ap_examples() {
        assert_eq!(average_precision(&[true], 1), Some(1.0));
        let ap = average_precision(&[false, true], 2).unwrap();
        assert!((ap - 51.0 / 101.0 * 0.5).abs() < 1e-15);
        assert_eq!(average_precision(&[], 3), Some(0.0));
        assert_eq!(average_precision(&[false], 0), None);
    }
}
