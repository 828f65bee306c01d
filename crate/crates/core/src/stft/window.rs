//! Symmetric analysis windows, scaled to unit peak.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowType {
    Hann,
    Gaussian,
    Hamming,
    Blackman,
    Rectangular,
    Bohman,
    TaperedCosine,
    FlatTop,
    Nuttall,
}

/// Standard deviation of the Gaussian window as a fraction of `L - 1`.
pub const GAUSSIAN_SIGMA_FRAC: f64 = 1.0 / 5.0;
/// Taper ratio of the tapered-cosine (Tukey) window.
pub const TUKEY_ALPHA: f64 = 0.5;

const HAMMING: [f64; 2] = [0.54, 0.46];
const HANN: [f64; 2] = [0.5, 0.5];
const BLACKMAN: [f64; 3] = [0.42, 0.5, 0.08];
const NUTTALL: [f64; 4] = [0.3635819, 0.4891775, 0.1365995, 0.0106411];
const FLAT_TOP: [f64; 5] = [
    0.21557895,
    0.41663158,
    0.277263158,
    0.083578947,
    0.006947368,
];

impl WindowType {
    /// Listing order of the window-type sweep.
    pub const ALL: [WindowType; 9] = [
        WindowType::Hann,
        WindowType::Gaussian,
        WindowType::Hamming,
        WindowType::Blackman,
        WindowType::Rectangular,
        WindowType::Bohman,
        WindowType::TaperedCosine,
        WindowType::FlatTop,
        WindowType::Nuttall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WindowType::Hann => "hann",
            WindowType::Gaussian => "gaussian",
            WindowType::Hamming => "hamming",
            WindowType::Blackman => "blackman",
            WindowType::Rectangular => "rectangular",
            WindowType::Bohman => "bohman",
            WindowType::TaperedCosine => "tapered_cosine",
            WindowType::FlatTop => "flat_top",
            WindowType::Nuttall => "nuttall",
        }
    }
}

impl fmt::Display for WindowType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WindowType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', ' '], "_");
        let w = match key.as_str() {
            "hann" | "hanning" => WindowType::Hann,
            "gaussian" => WindowType::Gaussian,
            "hamming" => WindowType::Hamming,
            "blackman" => WindowType::Blackman,
            "rectangular" | "rect" | "boxcar" => WindowType::Rectangular,
            "bohman" => WindowType::Bohman,
            "tapered_cosine" | "tukey" => WindowType::TaperedCosine,
            "flat_top" | "flattop" => WindowType::FlatTop,
            "nuttall" | "blackman_harris_nuttall" => WindowType::Nuttall,
            _ => return Err(Error::invalid_input(format!("unknown window type '{s}'"))),
        };
        Ok(w)
    }
}

/// Generalized cosine sum `sum_k (-1)^k a_k cos(2 pi k n / (L-1))`.
fn cosine_sum(coeffs: &[f64], n: usize, len: usize) -> f64 {
    let x = 2.0 * PI * n as f64 / (len - 1) as f64;
    coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * a * (k as f64 * x).cos()
        })
        .sum()
}

fn sample(kind: WindowType, n: usize, len: usize) -> f64 {
    let m = (len - 1) as f64;
    match kind {
        WindowType::Rectangular => 1.0,
        WindowType::Hann => cosine_sum(&HANN, n, len),
        WindowType::Hamming => cosine_sum(&HAMMING, n, len),
        WindowType::Blackman => cosine_sum(&BLACKMAN, n, len),
        WindowType::Nuttall => cosine_sum(&NUTTALL, n, len),
        WindowType::FlatTop => cosine_sum(&FLAT_TOP, n, len),
        WindowType::Gaussian => {
            let sigma = GAUSSIAN_SIGMA_FRAC * m;
            let d = n as f64 - m / 2.0;
            (-0.5 * (d / sigma).powi(2)).exp()
        }
        WindowType::Bohman => {
            let x = ((2.0 * n as f64 - m) / m).abs();
            (1.0 - x) * (PI * x).cos() + (PI * x).sin() / PI
        }
        WindowType::TaperedCosine => {
            let edge = TUKEY_ALPHA * m / 2.0;
            let t = n as f64;
            if t < edge {
                0.5 * (1.0 + (PI * (t / edge - 1.0)).cos())
            } else if t > m - edge {
                0.5 * (1.0 + (PI * ((m - t) / edge - 1.0)).cos())
            } else {
                1.0
            }
        }
    }
}

/// Symmetric window of `length` samples, divided by its largest sample so
/// the peak is exactly 1. Tapering windows of length 2 are all zero and are
/// returned unscaled.
pub fn make_window(kind: WindowType, length: usize) -> Result<Vec<f64>> {
    if length < 2 {
        return Err(Error::invalid_input(format!(
            "window length must be at least 2, got {length}"
        )));
    }
    let mut w = vec![0.0; length];
    for n in 0..length.div_ceil(2) {
        let v = sample(kind, n, length);
        w[n] = v;
        w[length - 1 - n] = v;
    }
    let peak = w.iter().cloned().fold(f64::MIN, f64::max);
    if peak > 0.0 && peak != 1.0 {
        w.iter_mut().for_each(|v| *v /= peak);
    }
    Ok(w)
}
