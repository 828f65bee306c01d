#![allow(dead_code)]

use num_complex::Complex64;
use rustfft::FftPlanner;

/// |DFT|^2 of `x`, unnormalized.
pub fn periodogram(x: &[Complex64]) -> Vec<f64> {
    let mut buf = x.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf.iter().map(|v| v.norm_sqr()).collect()
}

/// Direct O(n^2) DFT.
pub fn naive_dft(x: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(i, &v)| {
                    v * Complex64::from_polar(
                        1.0,
                        -2.0 * std::f64::consts::PI * (k * i % n) as f64 / n as f64,
                    )
                })
                .sum()
        })
        .collect()
}

/// 99%-power bandwidth in Hz of a burst centred near `carrier_hz`: the
/// distance between the 0.5% and 99.5% points of the cumulative power,
/// measured on the spectrum rotated so the carrier sits mid-band.
pub fn occupied_bandwidth(x: &[Complex64], sample_rate_hz: f64, carrier_hz: f64) -> f64 {
    occupied_bandwidth_of_psd(&periodogram(x), sample_rate_hz, carrier_hz)
}

/// Same as [`occupied_bandwidth`] on the averaged periodogram of several
/// equal-length realizations.
pub fn averaged_occupied_bandwidth(xs: &[Vec<Complex64>], sample_rate_hz: f64, carrier_hz: f64) -> f64 {
    let mut acc = vec![0.0; xs[0].len()];
    for x in xs {
        acc.iter_mut().zip(periodogram(x)).for_each(|(a, v)| *a += v);
    }
    occupied_bandwidth_of_psd(&acc, sample_rate_hz, carrier_hz)
}

fn occupied_bandwidth_of_psd(p: &[f64], sample_rate_hz: f64, carrier_hz: f64) -> f64 {
    let n = p.len();
    let carrier_bin = (carrier_hz / sample_rate_hz * n as f64).round() as isize;
    let shift = carrier_bin - (n / 2) as isize;
    let rotated: Vec<f64> = (0..n)
        .map(|i| p[(i as isize + shift).rem_euclid(n as isize) as usize])
        .collect();
    let total: f64 = rotated.iter().sum();
    let mut acc = 0.0;
    let mut lo = None;
    let mut hi = None;
    for (i, v) in rotated.iter().enumerate() {
        acc += v;
        if lo.is_none() && acc >= 0.005 * total {
            lo = Some(i);
        }
        if hi.is_none() && acc >= 0.995 * total {
            hi = Some(i);
        }
    }
    (hi.unwrap() - lo.unwrap() + 1) as f64 * sample_rate_hz / n as f64
}

/// Power-weighted mean frequency on the circle [0, fs).
pub fn spectral_centroid(x: &[Complex64], sample_rate_hz: f64) -> f64 {
    let p = periodogram(x);
    let n = p.len() as f64;
    let z: Complex64 = p
        .iter()
        .enumerate()
        .map(|(k, &v)| Complex64::from_polar(v, 2.0 * std::f64::consts::PI * k as f64 / n))
        .sum();
    z.arg().rem_euclid(2.0 * std::f64::consts::PI) / (2.0 * std::f64::consts::PI) * sample_rate_hz
}

/// Carrier estimate of a QPSK burst from the argmax of the fourth-power
/// spectrum; the four aliases `(k + m N) / 4` are disambiguated with the
/// spectral centroid.
pub fn qpsk_carrier_from_fourth_power(x: &[Complex64], sample_rate_hz: f64) -> f64 {
    let n = x.len();
    let x4: Vec<Complex64> = x.iter().map(|v| v.powi(4)).collect();
    let p = periodogram(&x4);
    let k = p
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    let centroid = spectral_centroid(x, sample_rate_hz);
    (0..4)
        .map(|m| (k + m * n) as f64 / 4.0 * sample_rate_hz / n as f64)
        .min_by(|a, b| circ_dist(*a, centroid, sample_rate_hz).total_cmp(&circ_dist(*b, centroid, sample_rate_hz)))
        .unwrap()
}

fn circ_dist(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// In-band SNR in dB of the noisy burst `x` occupying `[fc - hbw, fc + hbw]`.
/// The noise level per bin comes from bins at least `1.2 * hbw` away from the
/// carrier.
pub fn measured_in_band_snr_db(x: &[Complex64], sample_rate_hz: f64, carrier_hz: f64, half_bw_hz: f64) -> f64 {
    let p = periodogram(x);
    let n = p.len();
    let df = sample_rate_hz / n as f64;
    let mut in_band = 0.0;
    let mut n_in = 0usize;
    let mut out_band = 0.0;
    let mut n_out = 0usize;
    for (k, &v) in p.iter().enumerate() {
        let d = circ_dist(k as f64 * df, carrier_hz, sample_rate_hz);
        if d <= half_bw_hz {
            in_band += v;
            n_in += 1;
        } else if d >= 1.2 * half_bw_hz {
            out_band += v;
            n_out += 1;
        }
    }
    let noise_per_bin = out_band / n_out as f64;
    let noise = noise_per_bin * n_in as f64;
    10.0 * ((in_band - noise) / noise).log10()
}

/// Kolmogorov-Smirnov statistic of `samples` against Uniform(lo, hi).
pub fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic p-value of the KS statistic `d` for `n` samples.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut sum = 0.0;
    for j in 1..=100 {
        let j = j as f64;
        let term = 2.0 * (-1f64).powf(j - 1.0) * (-2.0 * j * j * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

use stftsweep_core::annotate::{Annotation, BoxCxCyWh};
use stftsweep_core::dataset::scene_annotations;
use stftsweep_core::eval::Detection;
use stftsweep_core::scenario::{render_scene, sample_scenario, SceneConfig, SceneSpec, Span};
use stftsweep_core::stft::{render_image, spectrogram, StftConfig, DEFAULT_FLOOR_DB};

pub fn gt(class_id: u32, cx: f64, cy: f64, w: f64, h: f64) -> Annotation {
    Annotation {
        class_id,
        bbox: BoxCxCyWh::new(cx, cy, w, h),
    }
}

pub fn det(class_id: u32, cx: f64, cy: f64, w: f64, h: f64, score: f64) -> Detection {
    Detection {
        class_id,
        bbox: BoxCxCyWh::new(cx, cy, w, h),
        score,
    }
}

/// Three images, two classes, every box dyadic so IoU values are exact.
///
/// Image 0: class-0 GT A, matched by a 0.9 detection at IoU 0.6.
/// Image 1: class-1 GT B, matched by a 0.4 detection at IoU 0.6, plus a
///          0.8 class-1 false positive elsewhere.
/// Image 2: class-0 GT C and class-1 GT D, both missed; one 0.7 class-0
///          false positive.
///
/// Class 0 ranks TP, FP with 2 GT: AP = 51/101 up to IoU 0.60, 0 beyond.
/// Class 1 ranks FP, TP with 2 GT: AP = 25.5/101 up to IoU 0.60, 0 beyond.
pub fn pr_fixture() -> (Vec<Vec<Detection>>, Vec<Vec<Annotation>>) {
    let gts = vec![
        vec![gt(0, 0.25, 0.25, 0.5, 0.5)],
        vec![gt(1, 0.25, 0.25, 0.5, 0.5)],
        vec![gt(0, 0.25, 0.25, 0.25, 0.25), gt(1, 0.75, 0.75, 0.25, 0.25)],
    ];
    let dets = vec![
        vec![det(0, 0.375, 0.25, 0.5, 0.5, 0.9)],
        vec![det(1, 0.375, 0.25, 0.5, 0.5, 0.4), det(1, 0.75, 0.75, 0.25, 0.25, 0.8)],
        vec![det(0, 0.75, 0.25, 0.25, 0.25, 0.7)],
    ];
    (dets, gts)
}

pub const FIXTURE_CLASS0_AP50: f64 = 51.0 / 101.0;
pub const FIXTURE_CLASS1_AP50: f64 = 25.5 / 101.0;
pub const FIXTURE_MAP50: f64 = 38.25 / 101.0;
pub const FIXTURE_MAP50_95: f64 = 11.475 / 101.0;

/// A default scene reduced to exactly one burst with SNR in `snr`.
pub fn single_burst_scene(index: u64, snr: Span<f64>) -> SceneSpec {
    let cfg = SceneConfig {
        snr_db: snr,
        emitters_per_timeslot: Span::new(1, 1),
        master_seed: 0x51_6e_67,
        ..SceneConfig::default()
    };
    let mut scene = sample_scenario(&cfg, index);
    let keep = (scene.scene_seed % scene.bursts.len() as u64) as usize;
    scene.bursts = vec![scene.bursts[keep].clone()];
    scene
}

/// Number of scenes out of `n` whose brightest 640x640 pixel lies inside the
/// burst's labelled box.
pub fn geometry_oracle_hits(n: u64) -> u64 {
    let mut hits = 0;
    for i in 0..n {
        let scene = single_burst_scene(i, Span::new(20.0, 25.0));
        let (iq, _) = render_scene(&scene).unwrap();
        let spec = spectrogram(&iq, &StftConfig::default(), DEFAULT_FLOOR_DB).unwrap();
        let img = render_image(&spec, 640, 640);
        let (mut best, mut at) = (0u8, (0u32, 0u32));
        for (x, y, p) in img.enumerate_pixels() {
            if p[0] > best {
                best = p[0];
                at = (x, y);
            }
        }
        let label = scene_annotations(&scene).unwrap()[0];
        let px = (at.0 as f64 + 0.5) / 640.0;
        let py = (at.1 as f64 + 0.5) / 640.0;
        if label.bbox.contains(px, py) {
            hits += 1;
        }
    }
    hits
}

use std::collections::BTreeMap;
use std::path::Path;

use stftsweep_core::dataset::{sweep_grid, SweepKind};

/// Every file under `dir` keyed by relative path.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

/// Sweep grids rendered in the golden-file line format.
pub fn grid_lines() -> Vec<String> {
    SweepKind::ALL
        .iter()
        .flat_map(|&k| {
            sweep_grid(k).entries.into_iter().map(move |e| {
                format!(
                    "{} {} {} {} {} {}",
                    k.name(),
                    e.name,
                    e.config.window,
                    e.config.window_len,
                    e.config.fft_size,
                    e.config.overlap
                )
            })
        })
        .collect()
}

pub fn golden_lines() -> Vec<String> {
    include_str!("../golden/sweep_grids.txt")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(str::to_string)
        .collect()
}
