//! Reference COCO evaluator written from the definitions, sharing no code
//! with the library: explicit preference rules per detection, interpolated
//! precision as a maximum over all curve points, and a lexicographic merge
//! across images.

#![allow(dead_code, clippy::type_complexity)]

use sdrforge::annotate::DatasetManifest;
use sdrforge::metrics::{Detection, EvalResult};

const RANGES: [(f64, f64); 4] = [(0.0, f64::INFINITY), (0.0, 1024.0), (1024.0, 9216.0), (9216.0, f64::INFINITY)];

fn corners(b: [f64; 4]) -> (f64, f64, f64, f64) {
    (b[0], b[1], b[0] + b[2], b[1] + b[3])
}

fn inter(a: [f64; 4], b: [f64; 4]) -> f64 {
    let (ax0, ay0, ax1, ay1) = corners(a);
    let (bx0, by0, bx1, by1) = corners(b);
    let w = (ax1.min(bx1) - ax0.max(bx0)).max(0.0);
    let h = (ay1.min(by1) - ay0.max(by0)).max(0.0);
    w * h
}

pub fn iou(a: [f64; 4], b: [f64; 4]) -> f64 {
    let i = inter(a, b);
    let u = a[2] * a[3] + b[2] * b[3] - i;
    if u <= 0.0 {
        0.0
    } else {
        i / u
    }
}

struct Gt {
    bbox: [f64; 4],
    crowd: bool,
    ignore: bool,
}

fn overlap(det: [f64; 4], g: &Gt) -> f64 {
    if g.crowd {
        let a = det[2] * det[3];
        if a <= 0.0 {
            0.0
        } else {
            inter(det, g.bbox) / a
        }
    } else {
        iou(det, g.bbox)
    }
}

/// Best candidate among `idx`: highest overlap, lowest index on ties.
fn best_of(idx: &[usize], det: [f64; 4], gts: &[Gt], taken: &[bool], thr: f64) -> Option<usize> {
    let mut cands: Vec<(usize, f64)> = idx
        .iter()
        .filter(|&&g| !taken[g] || gts[g].crowd)
        .map(|&g| (g, overlap(det, &gts[g])))
        .filter(|&(_, o)| o >= thr)
        .collect();
    cands.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    cands.first().map(|c| c.0)
}

/// Returns, in processing order, `(score, image, rank, counted, true_positive)`.
fn match_image(
    image: u64,
    gts: &[Gt],
    dets: &[&Detection],
    thr: f64,
    range: (f64, f64),
) -> Vec<(f64, u64, usize, bool, bool)> {
    let mut ranked: Vec<usize> = (0..dets.len()).collect();
    ranked.sort_by(|&a, &b| dets[b].score.partial_cmp(&dets[a].score).unwrap().then(a.cmp(&b)));
    ranked.truncate(100);
    // Among regular GTs lower original index wins ties; ignored GTs follow
    // in original order.
    let regular: Vec<usize> = (0..gts.len()).filter(|&g| !gts[g].ignore).collect();
    let ignored: Vec<usize> = (0..gts.len()).filter(|&g| gts[g].ignore).collect();
    let mut taken = vec![false; gts.len()];
    let mut out = Vec::new();
    for (rank, &d) in ranked.iter().enumerate() {
        let b = dets[d].bbox;
        let hit = best_of(&regular, b, gts, &taken, thr).or_else(|| best_of(&ignored, b, gts, &taken, thr));
        let (counted, tp) = match hit {
            Some(g) => {
                taken[g] = true;
                (!gts[g].ignore, true)
            }
            None => {
                let a = b[2] * b[3];
                (a >= range.0 && a < range.1, false)
            }
        };
        out.push((dets[d].score, image, rank, counted, tp));
    }
    out
}

fn ap_and_recall(mut entries: Vec<(f64, u64, usize, bool, bool)>, npos: usize) -> (f64, f64) {
    entries.retain(|e| e.3);
    entries.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut points = Vec::new();
    let mut tp = 0usize;
    for (i, e) in entries.iter().enumerate() {
        tp += e.4 as usize;
        points.push((tp as f64 / npos as f64, tp as f64 / (i + 1) as f64));
    }
    let mut sum = 0.0;
    for k in 0..=100 {
        let r = k as f64 / 100.0;
        sum += points.iter().filter(|p| p.0 >= r).map(|p| p.1).fold(0.0, f64::max);
    }
    (sum / 101.0, points.last().map_or(0.0, |p| p.0))
}

fn mean(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        None
    } else {
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// All categories listed in the ground truth are scored.
pub fn evaluate(gt: &DatasetManifest, dets: &[Detection]) -> EvalResult {
    let mut cats: Vec<u32> = gt.categories.iter().map(|c| c.id).collect();
    cats.sort();
    cats.dedup();
    let mut images: Vec<u64> = gt.images.iter().map(|i| i.id).collect();
    images.sort();
    images.dedup();
    let thresholds: Vec<f64> = (0..10).map(|i| (50 + 5 * i) as f64 / 100.0).collect();

    // aps[range] and recalls[range]: flattened (category, threshold).
    let mut aps: Vec<Vec<f64>> = vec![Vec::new(); 4];
    let mut ap50 = Vec::new();
    let mut ap75 = Vec::new();
    let mut recalls: Vec<Vec<f64>> = vec![Vec::new(); 4];
    for &c in &cats {
        for (r, &range) in RANGES.iter().enumerate() {
            let mut npos = 0;
            let mut per_thr: Vec<Vec<(f64, u64, usize, bool, bool)>> = vec![Vec::new(); thresholds.len()];
            for &img in &images {
                let gts: Vec<Gt> = gt
                    .annotations
                    .iter()
                    .filter(|a| a.image_id == img && a.category_id == c)
                    .map(|a| Gt {
                        bbox: a.bbox,
                        crowd: a.iscrowd != 0,
                        ignore: a.iscrowd != 0 || !(a.area >= range.0 && a.area < range.1),
                    })
                    .collect();
                npos += gts.iter().filter(|g| !g.ignore).count();
                let ds: Vec<&Detection> = dets.iter().filter(|d| d.image_id == img && d.category_id == c).collect();
                for (t, &thr) in thresholds.iter().enumerate() {
                    per_thr[t].extend(match_image(img, &gts, &ds, thr, range));
                }
            }
            if npos == 0 {
                continue;
            }
            for (t, entries) in per_thr.into_iter().enumerate() {
                let (ap, rec) = ap_and_recall(entries, npos);
                aps[r].push(ap);
                recalls[r].push(rec);
                if r == 0 && t == 0 {
                    ap50.push(ap);
                }
                if r == 0 && t == 5 {
                    ap75.push(ap);
                }
            }
        }
    }
    EvalResult {
        ap: mean(&aps[0]),
        ap50: mean(&ap50),
        ap75: mean(&ap75),
        ap_s: mean(&aps[1]),
        ap_m: mean(&aps[2]),
        ap_l: mean(&aps[3]),
        ar: mean(&recalls[0]),
        ar_s: mean(&recalls[1]),
        ar_m: mean(&recalls[2]),
        ar_l: mean(&recalls[3]),
    }
}
