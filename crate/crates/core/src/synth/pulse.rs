//! Root-raised-cosine pulse shaping.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Continuous root-raised-cosine impulse response, `t` in symbol periods,
/// unit symbol rate.
pub fn rrc(t: f64, rolloff: f64) -> f64 {
    let b = rolloff;
    if t.abs() < 1e-12 {
        return 1.0 - b + 4.0 * b / PI;
    }
    let quarter = 1.0 / (4.0 * b);
    if b > 0.0 && (t.abs() - quarter).abs() < 1e-9 {
        let a = PI / (4.0 * b);
        return b / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * t * (1.0 - b)).sin() + 4.0 * b * t * (PI * t * (1.0 + b)).cos();
    let den = PI * t * (1.0 - (4.0 * b * t).powi(2));
    num / den
}

fn check_shape_args(samples_per_symbol: f64, rolloff: f64) -> Result<()> {
    if !(samples_per_symbol >= 1.0) {
        return Err(Error::invalid_input(format!(
            "samples per symbol must be at least 1, got {samples_per_symbol}"
        )));
    }
    if !(rolloff > 0.0 && rolloff <= 1.0) {
        return Err(Error::invalid_input(format!("rolloff {rolloff} outside (0, 1]")));
    }
    Ok(())
}

/// Unit-energy RRC taps, `span_symbols * samples_per_symbol + 1` long and
/// centred on the middle tap.
pub fn rrc_taps(samples_per_symbol: usize, rolloff: f64, span_symbols: usize) -> Result<Vec<f64>> {
    check_shape_args(samples_per_symbol as f64, rolloff)?;
    let sps = samples_per_symbol;
    let half = (span_symbols * sps) as f64 / 2.0;
    let mut taps: Vec<f64> = (0..=span_symbols * sps)
        .map(|i| rrc((i as f64 - half) / sps as f64, rolloff))
        .collect();
    let energy = taps.iter().map(|h| h * h).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|h| *h /= energy);
    Ok(taps)
}

/// Upsamples `symbols` by `samples_per_symbol` (impulse train) and filters it
/// with unit-energy RRC taps.
///
/// The output holds `symbols.len() * sps + span * sps` samples: the full
/// convolution with its tail, zero-extended to that length. Callers trim it
/// to the burst they need.
pub fn pulse_shape(
    symbols: &[Complex64],
    samples_per_symbol: usize,
    rolloff: f64,
    span_symbols: usize,
) -> Result<Vec<Complex64>> {
    let taps = rrc_taps(samples_per_symbol, rolloff, span_symbols)?;
    let sps = samples_per_symbol;
    let out_len = symbols.len() * sps + span_symbols * sps;
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (i, &s) in symbols.iter().enumerate() {
        let base = i * sps;
        for (k, &h) in taps.iter().enumerate() {
            if let Some(slot) = out.get_mut(base + k) {
                *slot += s * h;
            }
        }
    }
    Ok(out)
}

/// Evaluates an RRC-shaped symbol stream at a possibly non-integer number of
/// samples per symbol.
///
/// `symbols[j]` is centred at sample time `(j as f64 - lead) * samples_per_symbol`,
/// and `n_out` samples starting at time 0 are produced. Each pulse is
/// truncated to `span_symbols` symbol periods. No amplitude normalization is
/// applied.
pub fn shape_fractional(
    symbols: &[Complex64],
    lead: usize,
    samples_per_symbol: f64,
    rolloff: f64,
    span_symbols: usize,
    n_out: usize,
) -> Result<Vec<Complex64>> {
    check_shape_args(samples_per_symbol, rolloff)?;
    let half_span = span_symbols as f64 / 2.0;
    let out = (0..n_out)
        .map(|n| {
            // position of sample n on the symbol axis (symbol index units)
            let pos = n as f64 / samples_per_symbol + lead as f64;
            let lo = (pos - half_span).ceil().max(0.0) as usize;
            let hi = ((pos + half_span).floor() as usize).min(symbols.len().saturating_sub(1));
            let mut acc = Complex64::new(0.0, 0.0);
            if symbols.is_empty() || lo > hi {
                return acc;
            }
            for (j, &s) in symbols.iter().enumerate().take(hi + 1).skip(lo) {
                acc += s * rrc(pos - j as f64, rolloff);
            }
            acc
        })
        .collect();
    Ok(out)
}
