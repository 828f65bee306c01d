//! Ground-truth bounding boxes in normalized image coordinates.
//!
//! Image x runs with time (left = scene start). Image y runs top-down, with
//! the top row at the highest frequency, so a carrier `f` sits at
//! `y = 1 - f / f_s`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{EmitterBurst, SceneConfig};

/// Axis-aligned box as `(cx, cy, w, h)` in `[0, 1]` image units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCxCyWh {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl BoxCxCyWh {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64) -> Self {
        Self { cx, cy, w, h }
    }

    pub fn from_corners(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            cx: (x0 + x1) / 2.0,
            cy: (y0 + y1) / 2.0,
            w: x1 - x0,
            h: y1 - y0,
        }
    }

    /// `(x0, y0, x1, y1)`.
    pub fn corners(&self) -> (f64, f64, f64, f64) {
        (
            self.cx - self.w / 2.0,
            self.cy - self.h / 2.0,
            self.cx + self.w / 2.0,
            self.cy + self.h / 2.0,
        )
    }

    pub fn area(&self) -> f64 {
        self.w.max(0.0) * self.h.max(0.0)
    }

    /// Intersection with the unit square.
    pub fn clipped(&self) -> Self {
        let (x0, y0, x1, y1) = self.corners();
        Self::from_corners(
            x0.clamp(0.0, 1.0),
            y0.clamp(0.0, 1.0),
            x1.clamp(0.0, 1.0),
            y1.clamp(0.0, 1.0),
        )
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (x0, y0, x1, y1) = self.corners();
        x >= x0 && x <= x1 && y >= y0 && y <= y1
    }

    pub fn is_inside_unit(&self) -> bool {
        let (x0, y0, x1, y1) = self.corners();
        let eps = 1e-12;
        x0 >= -eps && y0 >= -eps && x1 <= 1.0 + eps && y1 <= 1.0 + eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub class_id: u32,
    pub bbox: BoxCxCyWh,
}

/// Box spanning the burst's active samples and its configured double-sided
/// bandwidth, clipped to the image.
pub fn burst_to_bbox(burst: &EmitterBurst, scene: &SceneConfig) -> Result<Annotation> {
    let len = burst.len(scene);
    if len == 0 {
        return Err(Error::invalid_input("zero-length burst has no box"));
    }
    let total = scene.total_samples() as f64;
    let fs = scene.sample_rate_hz;
    let start = burst.scene_start(scene) as f64;
    let raw = BoxCxCyWh::new(
        (start + len as f64 / 2.0) / total,
        1.0 - burst.burst.carrier_hz / fs,
        len as f64 / total,
        burst.burst.occupied_bw_hz() / fs,
    );
    let bbox = raw.clipped();
    if bbox.area() <= 0.0 {
        return Err(Error::invalid_input(format!(
            "burst at {} Hz lies outside the observed band",
            burst.burst.carrier_hz
        )));
    }
    Ok(Annotation {
        class_id: burst.class_id,
        bbox,
    })
}

/// One `class cx cy w h` line per annotation, six decimals.
pub fn format_labels(annotations: &[Annotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        let b = a.bbox;
        writeln!(out, "{} {:.6} {:.6} {:.6} {:.6}", a.class_id, b.cx, b.cy, b.w, b.h).unwrap();
    }
    out
}

pub fn write_labels(annotations: &[Annotation], path: &Path) -> Result<()> {
    fs::write(path, format_labels(annotations)).map_err(|e| Error::io(path, e))
}

/// Splits a label line into the class id and the remaining numeric fields.
pub(crate) fn parse_fields(line: &str) -> std::result::Result<(u32, Vec<f64>), String> {
    let mut parts = line.split_whitespace();
    let class = parts
        .next()
        .ok_or("empty line")?
        .parse::<u32>()
        .map_err(|e| format!("bad class id: {e}"))?;
    let values = parts
        .map(|p| p.parse::<f64>().map_err(|e| format!("bad number '{p}': {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((class, values))
}

pub fn parse_labels(text: &str) -> std::result::Result<Vec<Annotation>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let (class_id, v) = parse_fields(line).map_err(|e| format!("line {}: {e}", i + 1))?;
            if v.len() != 4 {
                return Err(format!("line {}: expected 5 fields, got {}", i + 1, v.len() + 1));
            }
            Ok(Annotation {
                class_id,
                bbox: BoxCxCyWh::new(v[0], v[1], v[2], v[3]),
            })
        })
        .collect()
}

pub fn read_labels(path: &Path) -> Result<Vec<Annotation>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text).map_err(|reason| Error::Parse {
        path: path.to_path_buf(),
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{BurstParams, ModulationScheme};

    fn burst(carrier: f64, half_bw: f64, frac: f64, slot: usize, offset: usize) -> EmitterBurst {
        EmitterBurst {
            burst: BurstParams {
                scheme: ModulationScheme::Qpsk,
                carrier_hz: carrier,
                half_bw_hz: half_bw,
                duration_frac: frac,
                snr_db: 10.0,
                start_offset: offset,
            },
            timeslot_index: slot,
            class_id: 0,
            seed: 0,
        }
    }

    fn full_scene_config() -> SceneConfig {
        // one timeslot covering the whole scene
        SceneConfig {
            timeslot_len: 16384,
            n_timeslots: 1,
            ..SceneConfig::default()
        }
    }

    fn assert_box(a: BoxCxCyWh, b: (f64, f64, f64, f64)) {
        let eps = 1e-12;
        assert!(
            (a.cx - b.0).abs() < eps
                && (a.cy - b.1).abs() < eps
                && (a.w - b.2).abs() < eps
                && (a.h - b.3).abs() < eps,
            "{a:?} vs {b:?}"
        );
    }

    #[test]
    fn full_scene_box() {
        let a = burst_to_bbox(&burst(250e6, 50e6, 1.0, 0, 0), &full_scene_config()).unwrap();
        assert_box(a.bbox, (0.5, 0.5, 1.0, 0.2));
        let whole = burst_to_bbox(&burst(250e6, 250e6, 1.0, 0, 0), &full_scene_config()).unwrap();
        assert_box(whole.bbox, (0.5, 0.5, 1.0, 1.0));
    }

    #[test]
    fn placement_within_timeslots() {
        let cfg = SceneConfig::default();
        // slot 2 starts at 8192; 819 samples from offset 100
        let a = burst_to_bbox(&burst(100e6, 20e6, 0.2, 2, 100), &cfg).unwrap();
        let expect_cx = (8192.0 + 100.0 + 819.0 / 2.0) / 16384.0;
        assert_box(a.bbox, (expect_cx, 0.8, 819.0 / 16384.0, 0.08));
    }

    #[test]
    fn clips_at_band_edge() {
        // band 430..530 MHz, top 30 MHz falls outside the 500 MHz image
        let a = burst_to_bbox(&burst(480e6, 50e6, 1.0, 0, 0), &full_scene_config()).unwrap();
        let (x0, y0, x1, y1) = a.bbox.corners();
        assert!(y0.abs() < 1e-12 && (y1 - 0.14).abs() < 1e-12, "{y0} {y1}");
        assert!((a.bbox.h - 0.14).abs() < 1e-12);
        assert!(x0.abs() < 1e-12 && (x1 - 1.0).abs() < 1e-12);
        // 400 MHz with 100 MHz occupied bandwidth stays inside the band
        let b = burst_to_bbox(&burst(400e6, 50e6, 1.0, 0, 0), &full_scene_config()).unwrap();
        assert_box(b.bbox, (0.5, 0.2, 1.0, 0.2));
    }

    #[test]
    fn rejects_degenerate() {
        assert!(burst_to_bbox(&burst(250e6, 50e6, 0.0, 0, 0), &full_scene_config()).is_err());
        assert!(burst_to_bbox(&burst(900e6, 50e6, 1.0, 0, 0), &full_scene_config()).is_err());
    }

    #[test]
    fn label_format() {
        let a = Annotation {
            class_id: 0,
            bbox: BoxCxCyWh::new(0.5, 0.5, 1.0, 0.2),
        };
        assert_eq!(format_labels(&[a]), "0 0.500000 0.500000 1.000000 0.200000\n");
        assert_eq!(format_labels(&[]), "");
        let b = Annotation {
            class_id: 7,
            bbox: BoxCxCyWh::new(0.1, 0.2, 0.3, 0.4),
        };
        assert_eq!(
            format_labels(&[a, b]),
            "0 0.500000 0.500000 1.000000 0.200000\n7 0.100000 0.200000 0.300000 0.400000\n"
        );
    }

    #[test]
    fn write_and_read_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.txt");
        write_labels(&[], &path).unwrap();
        assert_eq!(fs::metadata(&path).unwrap().len(), 0);
        assert!(read_labels(&path).unwrap().is_empty());
        assert!(write_labels(&[], &dir.path().join("missing/x.txt")).is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(parse_labels("0 0.5 0.5 0.1\n").is_err());
        assert!(parse_labels("x 0.5 0.5 0.1 0.1\n").is_err());
        assert!(parse_labels("0 0.5 0.5 0.1 nope\n").is_err());
        assert_eq!(parse_labels("\n\n").unwrap(), vec![]);
    }
}
