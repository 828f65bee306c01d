//! Short-time Fourier transform, dB spectrograms and image rendering.

mod window;

use std::fmt;

use image::GrayImage;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::IqBuffer;

pub use window::{make_window, WindowType, GAUSSIAN_SIGMA_FRAC, TUKEY_ALPHA};

/// Lowest dB value kept in a spectrogram.
pub const DEFAULT_FLOOR_DB: f64 = -80.0;
/// Default rendered image size (height, width).
pub const DEFAULT_IMAGE_SIZE: (u32, u32) = (640, 640);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StftConfig {
    pub window: WindowType,
    pub window_len: usize,
    pub fft_size: usize,
    /// Fraction of the window shared by consecutive frames, in [0, 1).
    pub overlap: f64,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            window: WindowType::Hamming,
            window_len: 128,
            fft_size: 128,
            overlap: 0.5,
        }
    }
}

impl StftConfig {
    pub fn new(window: WindowType, window_len: usize, fft_size: usize, overlap: f64) -> Self {
        Self {
            window,
            window_len,
            fft_size,
            overlap,
        }
    }

    /// Frame advance: `W * (1 - overlap)` rounded half-up, at least 1.
    pub fn hop(&self) -> usize {
        let raw = self.window_len as f64 * (1.0 - self.overlap);
        ((raw + 0.5).floor() as usize).max(1)
    }

    pub fn frame_count(&self, n_samples: usize) -> usize {
        if n_samples < self.window_len {
            0
        } else {
            (n_samples - self.window_len) / self.hop() + 1
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.window_len < 2 {
            return Err(Error::invalid_config(format!(
                "window length {} must be at least 2",
                self.window_len
            )));
        }
        if self.fft_size < self.window_len {
            return Err(Error::invalid_config(format!(
                "FFT size {} is smaller than window length {}",
                self.fft_size, self.window_len
            )));
        }
        if !(0.0..1.0).contains(&self.overlap) {
            return Err(Error::invalid_config(format!(
                "overlap {} outside [0, 1)",
                self.overlap
            )));
        }
        Ok(())
    }

    /// Short tag such as `W128F128`.
    pub fn wf_label(&self) -> String {
        format!("W{}F{}", self.window_len, self.fft_size)
    }
}

impl fmt::Display for StftConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} overlap {:.0}%",
            self.wf_label(),
            self.window,
            self.overlap * 100.0
        )
    }
}

/// Complex STFT output, `n_frames` rows of `fft_size` bins, row-major.
#[derive(Debug, Clone)]
pub struct StftFrames {
    pub data: Vec<Complex64>,
    pub n_frames: usize,
    pub fft_size: usize,
    pub sample_rate_hz: f64,
    pub config: StftConfig,
}

impl StftFrames {
    pub fn frame(&self, m: usize) -> &[Complex64] {
        &self.data[m * self.fft_size..(m + 1) * self.fft_size]
    }
}

/// Windowed, zero-padded DFT of every full frame. No edge padding; a
/// trailing partial frame is dropped.
pub fn stft(iq: &IqBuffer, cfg: &StftConfig) -> Result<StftFrames> {
    cfg.validate()?;
    let n = iq.len();
    if n < cfg.window_len {
        return Err(Error::invalid_input(format!(
            "buffer of {n} samples is shorter than the {}-sample window",
            cfg.window_len
        )));
    }
    let window = make_window(cfg.window, cfg.window_len)?;
    let hop = cfg.hop();
    let n_frames = cfg.frame_count(n);
    let f = cfg.fft_size;
    let fft = FftPlanner::new().plan_fft_forward(f);
    let mut data = vec![Complex64::new(0.0, 0.0); n_frames * f];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for (m, frame) in data.chunks_exact_mut(f).enumerate() {
        let start = m * hop;
        for ((dst, &x), &w) in frame.iter_mut().zip(&iq.samples[start..]).zip(&window) {
            *dst = x * w;
        }
        fft.process_with_scratch(frame, &mut scratch);
    }
    Ok(StftFrames {
        data,
        n_frames,
        fft_size: f,
        sample_rate_hz: iq.sample_rate_hz,
        config: *cfg,
    })
}

/// Peak-normalized dB magnitude spectrogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    /// `n_frames x n_bins`, row-major.
    pub db: Vec<f64>,
    pub n_frames: usize,
    pub n_bins: usize,
    /// Centre time of each frame in seconds.
    pub frame_times: Vec<f64>,
    /// Bin frequencies covering [0, f_s), no shift.
    pub bin_freqs: Vec<f64>,
    pub floor_db: f64,
    pub config: StftConfig,
}

impl Spectrogram {
    #[inline]
    pub fn at(&self, frame: usize, bin: usize) -> f64 {
        self.db[frame * self.n_bins + bin]
    }
}

/// `max(20 log10(|X| / max|X|), floor_db)`; an all-zero input maps to the floor.
pub fn to_db(frames: &StftFrames, floor_db: f64) -> Spectrogram {
    let peak_sq = frames.data.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max);
    let db = frames
        .data
        .iter()
        .map(|x| {
            if peak_sq == 0.0 {
                return floor_db;
            }
            let v = 10.0 * (x.norm_sqr() / peak_sq).log10();
            if v.is_nan() {
                floor_db
            } else {
                v.max(floor_db)
            }
        })
        .collect();
    let cfg = frames.config;
    let fs = frames.sample_rate_hz;
    let hop = cfg.hop();
    Spectrogram {
        db,
        n_frames: frames.n_frames,
        n_bins: frames.fft_size,
        frame_times: (0..frames.n_frames)
            .map(|m| (m * hop) as f64 / fs + cfg.window_len as f64 / (2.0 * fs))
            .collect(),
        bin_freqs: (0..frames.fft_size)
            .map(|k| k as f64 * fs / frames.fft_size as f64)
            .collect(),
        floor_db,
        config: cfg,
    }
}

/// STFT followed by dB conversion.
pub fn spectrogram(iq: &IqBuffer, cfg: &StftConfig, floor_db: f64) -> Result<Spectrogram> {
    Ok(to_db(&stft(iq, cfg)?, floor_db))
}

/// Source coordinate of output pixel `dst` (pixel-centre alignment).
fn source_coord(dst: u32, n_dst: u32, n_src: usize) -> (usize, usize, f64) {
    let scale = n_src as f64 / f64::from(n_dst);
    let s = ((f64::from(dst) + 0.5) * scale - 0.5).clamp(0.0, (n_src - 1) as f64);
    let i0 = s.floor() as usize;
    let i1 = (i0 + 1).min(n_src - 1);
    (i0, i1, s - i0 as f64)
}

/// Grayscale image: frequency bins on the vertical axis (bin 0 on the
/// bottom row), frames on the horizontal axis, `[floor_db, 0]` mapped
/// linearly onto `[0, 255]`, bilinear resampling.
pub fn render_image(spec: &Spectrogram, out_height: u32, out_width: u32) -> GrayImage {
    let h = out_height.max(1);
    let w = out_width.max(1);
    let span = -spec.floor_db;
    let rows: Vec<_> = (0..h)
        .map(|y| {
            // native row r (top = 0) holds bin n_bins - 1 - r
            let (r0, r1, fy) = source_coord(y, h, spec.n_bins);
            (spec.n_bins - 1 - r0, spec.n_bins - 1 - r1, fy)
        })
        .collect();
    let cols: Vec<_> = (0..w).map(|x| source_coord(x, w, spec.n_frames)).collect();
    GrayImage::from_fn(w, h, |x, y| {
        let (b0, b1, fy) = rows[y as usize];
        let (m0, m1, fx) = cols[x as usize];
        let top = spec.at(m0, b0) * (1.0 - fx) + spec.at(m1, b0) * fx;
        let bottom = spec.at(m0, b1) * (1.0 - fx) + spec.at(m1, b1) * fx;
        let v = top * (1.0 - fy) + bottom * fy;
        let level = ((v - spec.floor_db) / span * 255.0).round().clamp(0.0, 255.0);
        image::Luma([level as u8])
    })
}
