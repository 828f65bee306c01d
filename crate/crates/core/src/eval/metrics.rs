//! IoU and COCO-style average precision (101-point interpolation).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::annotate::{Annotation, BoxCxCyWh};
use crate::error::{Error, Result};

use super::Detection;

/// Intersection over union; 0 when either box has no area.
pub fn iou(a: &BoxCxCyWh, b: &BoxCxCyWh) -> f64 {
    let (ax0, ay0, ax1, ay1) = a.corners();
    let (bx0, by0, bx1, by1) = b.corners();
    let iw = (ax1.min(bx1) - ax0.max(bx0)).max(0.0);
    let ih = (ay1.min(by1) - ay0.max(by0)).max(0.0);
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if inter <= 0.0 || union <= 0.0 {
        0.0
    } else {
        (inter / union).min(1.0)
    }
}

/// 0.50, 0.55, ..., 0.95.
pub fn iou_thresholds() -> Vec<f64> {
    (10..20).map(|i| f64::from(i) / 20.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAp {
    pub class_id: u32,
    pub n_ground_truth: usize,
    /// AP at each IoU threshold, same order as `MapReport::iou_thresholds`.
    pub ap: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapReport {
    pub iou_thresholds: Vec<f64>,
    pub per_class: Vec<ClassAp>,
    pub map50: f64,
    pub map50_95: f64,
}

impl MapReport {
    /// Mean over classes at threshold index `t`.
    pub fn map_at(&self, t: usize) -> f64 {
        self.per_class.iter().map(|c| c.ap[t]).sum::<f64>() / self.per_class.len() as f64
    }

    pub fn table(&self, class_names: &dyn Fn(u32) -> String) -> String {
        let mut out = format!("{:<12} {:>6} {:>8} {:>10}\n", "class", "gt", "AP50", "AP50-95");
        for c in &self.per_class {
            let mean = c.ap.iter().sum::<f64>() / c.ap.len() as f64;
            out += &format!(
                "{:<12} {:>6} {:>8.4} {:>10.4}\n",
                class_names(c.class_id),
                c.n_ground_truth,
                c.ap[0],
                mean
            );
        }
        out += &format!("{:<12} {:>6} {:>8.4} {:>10.4}\n", "all", "", self.map50, self.map50_95);
        out
    }
}

/// Area under the 101-point interpolated precision envelope.
///
/// `matches` lists detections in descending score order (`true` = true
/// positive); `n_positives` is the number of ground-truth boxes.
pub fn average_precision_101(matches: &[bool], n_positives: usize) -> f64 {
    if n_positives == 0 {
        return 0.0;
    }
    let mut tp = 0usize;
    let mut recall = Vec::with_capacity(matches.len());
    let mut precision = Vec::with_capacity(matches.len());
    for (i, &m) in matches.iter().enumerate() {
        if m {
            tp += 1;
        }
        recall.push(tp as f64 / n_positives as f64);
        precision.push(tp as f64 / (i + 1) as f64);
    }
    for i in (0..precision.len().saturating_sub(1)).rev() {
        precision[i] = precision[i].max(precision[i + 1]);
    }
    let total: f64 = (0..=100)
        .map(|r| {
            let level = f64::from(r) / 100.0;
            let idx = recall.partition_point(|&x| x < level);
            precision.get(idx).copied().unwrap_or(0.0)
        })
        .sum();
    total / 101.0
}

/// Greedy matching of one class at one IoU threshold; returns the TP flags
/// of the class's detections in descending score order.
fn match_class(
    detections: &[Vec<Detection>],
    ground_truth: &[Vec<Annotation>],
    class_id: u32,
    threshold: f64,
) -> Vec<bool> {
    let mut ranked: Vec<(usize, &Detection)> = detections
        .iter()
        .enumerate()
        .flat_map(|(img, dets)| dets.iter().map(move |d| (img, d)))
        .filter(|(_, d)| d.class_id == class_id)
        .collect();
    ranked.sort_by(|a, b| b.1.score.total_cmp(&a.1.score));
    let mut taken: Vec<Vec<bool>> = ground_truth.iter().map(|g| vec![false; g.len()]).collect();
    ranked
        .iter()
        .map(|&(img, det)| {
            let mut best: Option<(usize, f64)> = None;
            for (j, gt) in ground_truth[img].iter().enumerate() {
                if gt.class_id != class_id || taken[img][j] {
                    continue;
                }
                let overlap = iou(&det.bbox, &gt.bbox);
                if overlap >= threshold && best.is_none_or(|(_, b)| overlap > b) {
                    best = Some((j, overlap));
                }
            }
            match best {
                Some((j, _)) => {
                    taken[img][j] = true;
                    true
                }
                None => false,
            }
        })
        .collect()
}

/// Per-class AP at IoU 0.50..0.95, averaged over the classes that have
/// ground truth. `detections[i]` and `ground_truth[i]` describe image `i`.
pub fn map_scores(
    detections: &[Vec<Detection>],
    ground_truth: &[Vec<Annotation>],
    n_classes: u32,
) -> Result<MapReport> {
    if detections.len() != ground_truth.len() {
        return Err(Error::invalid_input(format!(
            "{} prediction sets for {} images",
            detections.len(),
            ground_truth.len()
        )));
    }
    let classes: BTreeSet<u32> = ground_truth
        .iter()
        .flatten()
        .map(|a| a.class_id)
        .filter(|&c| c < n_classes)
        .collect();
    if classes.is_empty() {
        return Err(Error::invalid_input("no ground-truth boxes to score against"));
    }
    let thresholds = iou_thresholds();
    let per_class: Vec<ClassAp> = classes
        .iter()
        .map(|&class_id| {
            let n_gt = ground_truth
                .iter()
                .flatten()
                .filter(|a| a.class_id == class_id)
                .count();
            let ap = thresholds
                .iter()
                .map(|&t| {
                    average_precision_101(&match_class(detections, ground_truth, class_id, t), n_gt)
                })
                .collect();
            ClassAp {
                class_id,
                n_ground_truth: n_gt,
                ap,
            }
        })
        .collect();
    let mut report = MapReport {
        iou_thresholds: thresholds,
        per_class,
        map50: 0.0,
        map50_95: 0.0,
    };
    report.map50 = report.map_at(0);
    report.map50_95 =
        (0..report.iou_thresholds.len()).map(|t| report.map_at(t)).sum::<f64>() / 10.0;
    Ok(report)
}

/// Maps every class id to 0 for class-agnostic scoring.
pub fn collapse_classes(
    detections: &[Vec<Detection>],
    ground_truth: &[Vec<Annotation>],
) -> (Vec<Vec<Detection>>, Vec<Vec<Annotation>>) {
    let dets = detections
        .iter()
        .map(|ds| ds.iter().map(|d| Detection { class_id: 0, ..*d }).collect())
        .collect();
    let gts = ground_truth
        .iter()
        .map(|gs| gs.iter().map(|g| Annotation { class_id: 0, ..*g }).collect())
        .collect();
    (dets, gts)
}
