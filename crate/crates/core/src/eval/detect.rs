//! Classical energy detector: threshold, 8-connected components, boxes.

use crate::annotate::BoxCxCyWh;
use crate::stft::Spectrogram;

use super::Detection;

/// Detector settings. Defaults come from the noise-only false-alarm sweep
/// in the crate's integration tests.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetectorConfig {
    /// Threshold relative to the spectrogram peak (dB, negative).
    pub threshold_db: f64,
    /// Smallest component, in spectrogram cells, reported as a detection.
    pub min_area: usize,
    /// Cells must also clear the estimated noise floor by this much.
    pub noise_guard_db: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            threshold_db: -20.0,
            min_area: 16,
            noise_guard_db: 6.0,
        }
    }
}

/// 10th-percentile offset of an exponential power distribution:
/// `-10 log10(-ln 0.9)`.
const P10_TO_MEAN_DB: f64 = 9.773_050_040_211_62;

/// Mean noise power in dB, from the 10th percentile of the cells.
/// Assumes at least 10% of the cells are noise-only.
pub fn estimate_noise_floor_db(spec: &Spectrogram) -> f64 {
    let mut values = spec.db.clone();
    let k = values.len() / 10;
    let (_, q, _) = values.select_nth_unstable_by(k, f64::total_cmp);
    *q + P10_TO_MEAN_DB
}

pub fn detect_energy(spec: &Spectrogram, threshold_db: f64, min_area: usize) -> Vec<Detection> {
    detect_energy_with(
        spec,
        &DetectorConfig {
            threshold_db,
            min_area,
            ..DetectorConfig::default()
        },
    )
}

/// Class-agnostic detections (`class_id` 0) for every connected region of
/// cells above `max(threshold_db, noise floor + guard)`.
pub fn detect_energy_with(spec: &Spectrogram, cfg: &DetectorConfig) -> Vec<Detection> {
    let threshold = cfg
        .threshold_db
        .max(estimate_noise_floor_db(spec) + cfg.noise_guard_db);
    if threshold >= 0.0 {
        return Vec::new();
    }
    let (frames, bins) = (spec.n_frames, spec.n_bins);
    let above: Vec<bool> = spec.db.iter().map(|&v| v > threshold).collect();
    let mut seen = vec![false; above.len()];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    for start in 0..above.len() {
        if !above[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let (mut m0, mut m1, mut k0, mut k1) = (usize::MAX, 0, usize::MAX, 0);
        let mut area = 0usize;
        let mut excess = 0.0;
        while let Some(cell) = stack.pop() {
            let (m, k) = (cell / bins, cell % bins);
            area += 1;
            excess += (spec.db[cell] - threshold) / -threshold;
            m0 = m0.min(m);
            m1 = m1.max(m);
            k0 = k0.min(k);
            k1 = k1.max(k);
            for dm in -1isize..=1 {
                for dk in -1isize..=1 {
                    let (nm, nk) = (m as isize + dm, k as isize + dk);
                    if nm < 0 || nk < 0 || nm >= frames as isize || nk >= bins as isize {
                        continue;
                    }
                    let next = nm as usize * bins + nk as usize;
                    if above[next] && !seen[next] {
                        seen[next] = true;
                        stack.push(next);
                    }
                }
            }
        }
        if area < cfg.min_area {
            continue;
        }
        let bbox = BoxCxCyWh::from_corners(
            m0 as f64 / frames as f64,
            1.0 - (k1 + 1) as f64 / bins as f64,
            (m1 + 1) as f64 / frames as f64,
            1.0 - k0 as f64 / bins as f64,
        );
        out.push(Detection {
            class_id: 0,
            bbox,
            score: (excess / area as f64).clamp(0.0, 1.0),
        });
    }
    out
}
