//! Baseline detector and detection metrics.

mod detect;
mod metrics;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotate::{parse_fields, BoxCxCyWh};
use crate::error::{Error, Result};

pub use detect::{detect_energy, detect_energy_with, estimate_noise_floor_db, DetectorConfig};
pub use metrics::{
    collapse_classes, iou, iou_thresholds, map_scores, average_precision_101, ClassAp, MapReport,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub class_id: u32,
    pub bbox: BoxCxCyWh,
    pub score: f64,
}

/// Label-file format with a trailing score column.
pub fn format_predictions(detections: &[Detection]) -> String {
    let mut out = String::new();
    for d in detections {
        let b = d.bbox;
        writeln!(
            out,
            "{} {:.6} {:.6} {:.6} {:.6} {:.6}",
            d.class_id, b.cx, b.cy, b.w, b.h, d.score
        )
        .unwrap();
    }
    out
}

pub fn parse_predictions(text: &str) -> std::result::Result<Vec<Detection>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let (class_id, v) = parse_fields(line).map_err(|e| format!("line {}: {e}", i + 1))?;
            if v.len() != 5 {
                return Err(format!("line {}: expected 6 fields, got {}", i + 1, v.len() + 1));
            }
            Ok(Detection {
                class_id,
                bbox: BoxCxCyWh::new(v[0], v[1], v[2], v[3]),
                score: v[4],
            })
        })
        .collect()
}

pub fn write_predictions(detections: &[Detection], path: &Path) -> Result<()> {
    fs::write(path, format_predictions(detections)).map_err(|e| Error::io(path, e))
}

pub fn read_predictions(path: &Path) -> Result<Vec<Detection>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_predictions(&text).map_err(|reason| Error::Parse {
        path: path.to_path_buf(),
        reason,
    })
}
