//! Cyclic-prefix OFDM.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Each block of `n_subcarriers` frequency-domain symbols becomes one
/// time-domain OFDM symbol (inverse DFT), prefixed with its last `cp_len`
/// samples. The whole output is scaled to unit mean power.
pub fn ofdm_modulate(
    symbols: &[Complex64],
    n_subcarriers: usize,
    cp_len: usize,
) -> Result<Vec<Complex64>> {
    if n_subcarriers == 0 || symbols.len() % n_subcarriers != 0 {
        return Err(Error::invalid_input(format!(
            "{} symbols do not fill whole blocks of {n_subcarriers} subcarriers",
            symbols.len()
        )));
    }
    if cp_len >= n_subcarriers {
        return Err(Error::invalid_input(format!(
            "cyclic prefix {cp_len} must be shorter than {n_subcarriers}"
        )));
    }
    let ifft = FftPlanner::new().plan_fft_inverse(n_subcarriers);
    let mut out = Vec::with_capacity(symbols.len() / n_subcarriers * (n_subcarriers + cp_len));
    let mut block = vec![Complex64::new(0.0, 0.0); n_subcarriers];
    for chunk in symbols.chunks_exact(n_subcarriers) {
        block.copy_from_slice(chunk);
        ifft.process(&mut block);
        out.extend_from_slice(&block[n_subcarriers - cp_len..]);
        out.extend_from_slice(&block);
    }
    let power = out.iter().map(|x| x.norm_sqr()).sum::<f64>() / out.len().max(1) as f64;
    if power > 0.0 {
        let g = power.sqrt().recip();
        out.iter_mut().for_each(|x| *x *= g);
    }
    Ok(out)
}

/// Subcarrier layout used for burst synthesis: 64-point grid, 16-sample
/// prefix, subcarriers -26..=26 loaded except DC.
#[derive(Debug, Clone, Copy)]
pub struct OfdmLayout {
    pub n_subcarriers: usize,
    pub cp_len: usize,
    pub half_loaded: i32,
}

impl Default for OfdmLayout {
    fn default() -> Self {
        Self {
            n_subcarriers: 64,
            cp_len: 16,
            half_loaded: 26,
        }
    }
}

impl OfdmLayout {
    /// Signed subcarrier offsets carrying data.
    pub fn loaded(&self) -> Vec<i32> {
        (-self.half_loaded..=self.half_loaded)
            .filter(|&k| k != 0)
            .collect()
    }

    pub fn n_loaded(&self) -> usize {
        2 * self.half_loaded as usize
    }

    /// Places one block of loaded-subcarrier symbols onto the full IDFT grid.
    pub fn to_grid(&self, data: &[Complex64]) -> Vec<Complex64> {
        let n = self.n_subcarriers as i32;
        let mut grid = vec![Complex64::new(0.0, 0.0); self.n_subcarriers];
        for (&k, &d) in self.loaded().iter().zip(data) {
            grid[k.rem_euclid(n) as usize] = d;
        }
        grid
    }
}

/// Evaluates a CP-OFDM waveform at an arbitrary output rate.
///
/// `blocks` holds `layout.n_loaded()` symbols per OFDM symbol.
/// `samples_per_useful` is the useful (post-prefix) symbol duration in output
/// samples, i.e. `sample_rate / subcarrier_spacing`. Sample 0 is the start of
/// the first cyclic prefix. Unnormalized.
pub fn ofdm_evaluate(
    blocks: &[Complex64],
    layout: &OfdmLayout,
    samples_per_useful: f64,
    n_out: usize,
) -> Vec<Complex64> {
    let loaded = layout.loaded();
    let per_block = layout.n_loaded();
    let cp = samples_per_useful * layout.cp_len as f64 / layout.n_subcarriers as f64;
    let total = samples_per_useful + cp;
    (0..n_out)
        .map(|n| {
            let t = n as f64;
            let b = (t / total).floor() as usize;
            let Some(data) = blocks.get(b * per_block..(b + 1) * per_block) else {
                return Complex64::new(0.0, 0.0);
            };
            // time relative to the start of the useful part
            let tau = t - b as f64 * total - cp;
            let w = 2.0 * PI * tau / samples_per_useful;
            data.iter()
                .zip(&loaded)
                .map(|(&d, &k)| d * Complex64::from_polar(1.0, w * f64::from(k)))
                .sum()
        })
        .collect()
}
