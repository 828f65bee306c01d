//! Single-burst waveform synthesis for the eight digital modulation classes.
//!
//! A burst is built at complex baseband, scaled to a requested in-band SNR
//! against a white noise floor, and mixed up to its carrier.

mod constellation;
mod ofdm;
mod pulse;
mod spread;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

pub use constellation::{constellation, map_bits_to_symbols, symbol_for_index};
pub use ofdm::{ofdm_evaluate, ofdm_modulate, OfdmLayout};
pub use pulse::{pulse_shape, rrc, rrc_taps, shape_fractional};
pub use spread::{cdma_despread, cdma_spread, walsh_code};

/// RRC rolloff used for every single-carrier and CDMA burst.
pub const ROLLOFF: f64 = 0.25;
/// RRC truncation, in symbol periods.
pub const SPAN_SYMBOLS: usize = 8;
/// Walsh code length for CDMA-QPSK.
pub const CDMA_CODE_LEN: usize = 8;

/// 99%-power bandwidth of the truncated RRC pulse, in units of the symbol
/// (chip) rate. The symbol rate is chosen as `2 * half_bw / factor`.
pub const RRC_OCCUPANCY: f64 = 1.103;
/// 99%-power bandwidth of the default OFDM layout in subcarrier spacings.
pub const OFDM_OCCUPANCY: f64 = 53.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModulationScheme {
    #[serde(rename = "QPSK")]
    Qpsk,
    #[serde(rename = "8PSK")]
    Psk8,
    #[serde(rename = "16PSK")]
    Psk16,
    #[serde(rename = "32PSK")]
    Psk32,
    #[serde(rename = "16QAM")]
    Qam16,
    #[serde(rename = "32QAM")]
    Qam32,
    #[serde(rename = "CDMA-QPSK")]
    CdmaQpsk,
    #[serde(rename = "OFDM-QPSK")]
    OfdmQpsk,
}

impl ModulationScheme {
    /// All schemes in class-id order.
    pub const ALL: [ModulationScheme; 8] = [
        ModulationScheme::Qpsk,
        ModulationScheme::Psk8,
        ModulationScheme::Psk16,
        ModulationScheme::Psk32,
        ModulationScheme::Qam16,
        ModulationScheme::Qam32,
        ModulationScheme::CdmaQpsk,
        ModulationScheme::OfdmQpsk,
    ];

    pub fn class_id(self) -> u32 {
        self as u32
    }

    pub fn from_class_id(id: u32) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ModulationScheme::Qpsk => "QPSK",
            ModulationScheme::Psk8 => "8PSK",
            ModulationScheme::Psk16 => "16PSK",
            ModulationScheme::Psk32 => "32PSK",
            ModulationScheme::Qam16 => "16QAM",
            ModulationScheme::Qam32 => "32QAM",
            ModulationScheme::CdmaQpsk => "CDMA-QPSK",
            ModulationScheme::OfdmQpsk => "OFDM-QPSK",
        }
    }

    pub fn bits_per_symbol(self) -> u32 {
        match self {
            ModulationScheme::Qpsk | ModulationScheme::CdmaQpsk | ModulationScheme::OfdmQpsk => 2,
            ModulationScheme::Psk8 => 3,
            ModulationScheme::Psk16 | ModulationScheme::Qam16 => 4,
            ModulationScheme::Psk32 | ModulationScheme::Qam32 => 5,
        }
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of one transmission.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurstParams {
    pub scheme: ModulationScheme,
    pub carrier_hz: f64,
    /// Single-sided bandwidth; the burst occupies `2 * half_bw_hz`.
    pub half_bw_hz: f64,
    /// Fraction of a timeslot in (0, 1].
    pub duration_frac: f64,
    pub snr_db: f64,
    /// First sample of the burst within its timeslot.
    pub start_offset: usize,
}

impl BurstParams {
    pub fn len(&self, timeslot_len: usize) -> usize {
        (self.duration_frac * timeslot_len as f64).floor() as usize
    }

    pub fn occupied_bw_hz(&self) -> f64 {
        2.0 * self.half_bw_hz
    }

    fn validate(&self, timeslot_len: usize) -> Result<usize> {
        if !(self.duration_frac > 0.0 && self.duration_frac <= 1.0) {
            return Err(Error::invalid_config(format!(
                "duration fraction {} outside (0, 1]",
                self.duration_frac
            )));
        }
        if !(self.half_bw_hz > 0.0) || !self.carrier_hz.is_finite() || !self.snr_db.is_finite() {
            return Err(Error::invalid_config(format!("invalid burst parameters {self:?}")));
        }
        let len = self.len(timeslot_len);
        if self.start_offset + len > timeslot_len {
            return Err(Error::invalid_config(format!(
                "burst of {len} samples at offset {} overruns a {timeslot_len}-sample timeslot",
                self.start_offset
            )));
        }
        Ok(len)
    }
}

/// Complex baseband samples at a fixed sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct IqBuffer {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
}

impl IqBuffer {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Self {
        Self {
            samples,
            sample_rate_hz,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    pub fn mean_power(&self) -> f64 {
        mean_power(&self.samples)
    }
}

/// One synthesized burst and where it sits in its timeslot.
#[derive(Debug, Clone, PartialEq)]
pub struct Burst {
    pub iq: IqBuffer,
    pub start_offset: usize,
    pub len: usize,
}

pub(crate) fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64
}

/// Length of one modulation symbol in output samples.
pub fn symbol_period_samples(scheme: ModulationScheme, half_bw_hz: f64, sample_rate_hz: f64) -> f64 {
    match scheme {
        ModulationScheme::OfdmQpsk => sample_rate_hz * OFDM_OCCUPANCY / (2.0 * half_bw_hz),
        ModulationScheme::CdmaQpsk => {
            CDMA_CODE_LEN as f64 * sample_rate_hz * RRC_OCCUPANCY / (2.0 * half_bw_hz)
        }
        _ => sample_rate_hz * RRC_OCCUPANCY / (2.0 * half_bw_hz),
    }
}

fn random_symbols<R: Rng>(rng: &mut R, scheme: ModulationScheme, n: usize) -> Vec<Complex64> {
    let order = 1u32 << scheme.bits_per_symbol();
    (0..n)
        .map(|_| symbol_for_index(scheme, rng.random_range(0..order)))
        .collect()
}

/// Unit-power complex baseband waveform of `len` samples, carrier not applied.
pub fn synthesize_baseband(
    scheme: ModulationScheme,
    half_bw_hz: f64,
    len: usize,
    sample_rate_hz: f64,
    seed: u64,
) -> Result<Vec<Complex64>> {
    let period = symbol_period_samples(scheme, half_bw_hz, sample_rate_hz);
    if (len as f64) < period {
        return Err(Error::invalid_config(format!(
            "burst of {len} samples is shorter than one {scheme} symbol ({period:.1} samples)"
        )));
    }
    let mut rng = seed::rng(seed);
    let mut wave = match scheme {
        ModulationScheme::OfdmQpsk => {
            let layout = OfdmLayout::default();
            let spu = period;
            let block_len = spu * (1.0 + layout.cp_len as f64 / layout.n_subcarriers as f64);
            let n_blocks = (len as f64 / block_len).ceil() as usize + 1;
            let data = random_symbols(&mut rng, ModulationScheme::Qpsk, n_blocks * layout.n_loaded());
            ofdm_evaluate(&data, &layout, spu, len)
        }
        ModulationScheme::CdmaQpsk => {
            let sps = period / CDMA_CODE_LEN as f64;
            let lead = SPAN_SYMBOLS / 2 + 1;
            let n_chips = (len as f64 / sps).ceil() as usize + 2 * lead + 1;
            let n_sym = n_chips.div_ceil(CDMA_CODE_LEN);
            let mut chips = vec![Complex64::new(0.0, 0.0); n_sym * CDMA_CODE_LEN];
            for user in 0..CDMA_CODE_LEN {
                let symbols = random_symbols(&mut rng, ModulationScheme::Qpsk, n_sym);
                let spread = cdma_spread(&symbols, &walsh_code(CDMA_CODE_LEN, user))?;
                chips.iter_mut().zip(spread).for_each(|(c, s)| *c += s);
            }
            shape_fractional(&chips, lead, sps, ROLLOFF, SPAN_SYMBOLS, len)?
        }
        _ => {
            let lead = SPAN_SYMBOLS / 2 + 1;
            let n_sym = (len as f64 / period).ceil() as usize + 2 * lead + 1;
            let symbols = random_symbols(&mut rng, scheme, n_sym);
            shape_fractional(&symbols, lead, period, ROLLOFF, SPAN_SYMBOLS, len)?
        }
    };
    let p = mean_power(&wave);
    if p > 0.0 {
        let g = p.sqrt().recip();
        wave.iter_mut().for_each(|x| *x *= g);
    }
    Ok(wave)
}

/// Amplitude that puts a unit-power burst at `snr_db` above the noise
/// collected in its double-sided bandwidth.
pub fn burst_amplitude(params: &BurstParams, sample_rate_hz: f64, noise_power: f64) -> f64 {
    let in_band_noise = noise_power * params.occupied_bw_hz() / sample_rate_hz;
    (10f64.powf(params.snr_db / 10.0) * in_band_noise).sqrt()
}

/// Synthesizes one burst at its carrier with an extra linear `gain`.
pub fn synthesize_burst_with_gain(
    params: &BurstParams,
    timeslot_len: usize,
    sample_rate_hz: f64,
    noise_power: f64,
    seed: u64,
    gain: f64,
) -> Result<Burst> {
    let len = params.validate(timeslot_len)?;
    if len == 0 {
        return Err(Error::invalid_config("burst has zero length"));
    }
    let base = synthesize_baseband(params.scheme, params.half_bw_hz, len, sample_rate_hz, seed)?;
    let amp = burst_amplitude(params, sample_rate_hz, noise_power) * gain;
    let w = 2.0 * PI * params.carrier_hz / sample_rate_hz;
    let samples = base
        .iter()
        .enumerate()
        .map(|(n, &x)| x * Complex64::from_polar(amp, w * n as f64))
        .collect();
    Ok(Burst {
        iq: IqBuffer::new(samples, sample_rate_hz),
        start_offset: params.start_offset,
        len,
    })
}

/// Synthesizes one burst: baseband waveform scaled to the requested in-band
/// SNR against per-sample noise power `noise_power`, mixed to the carrier.
pub fn synthesize_burst(
    params: &BurstParams,
    timeslot_len: usize,
    sample_rate_hz: f64,
    noise_power: f64,
    seed: u64,
) -> Result<Burst> {
    synthesize_burst_with_gain(params, timeslot_len, sample_rate_hz, noise_power, seed, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(scheme: ModulationScheme) -> BurstParams {
        BurstParams {
            scheme,
            carrier_hz: 250e6,
            half_bw_hz: 40e6,
            duration_frac: 0.2,
            snr_db: 10.0,
            start_offset: 100,
        }
    }

    #[test]
    fn class_ids_follow_listing_order() {
        for (i, s) in ModulationScheme::ALL.iter().enumerate() {
            assert_eq!(s.class_id(), i as u32);
            assert_eq!(ModulationScheme::from_class_id(i as u32), Some(*s));
        }
        assert_eq!(ModulationScheme::from_class_id(8), None);
        let bps: Vec<u32> = ModulationScheme::ALL.iter().map(|s| s.bits_per_symbol()).collect();
        assert_eq!(bps, vec![2, 3, 4, 5, 4, 5, 2, 2]);
    }

    #[test]
    fn burst_length_is_floor_of_fraction() {
        let b = synthesize_burst(&params(ModulationScheme::Qpsk), 4096, 500e6, 1.0, 1).unwrap();
        assert_eq!(b.len, 819);
        assert_eq!(b.iq.len(), 819);
        assert_eq!(b.start_offset, 100);
    }

    #[test]
    fn zero_db_burst_matches_in_band_noise() {
        for scheme in ModulationScheme::ALL {
            let mut p = params(scheme);
            p.snr_db = 0.0;
            let b = synthesize_burst(&p, 4096, 500e6, 1.0, 3).unwrap();
            let expect = 2.0 * p.half_bw_hz / 500e6;
            assert!((b.iq.mean_power() - expect).abs() < 1e-12 * expect.max(1.0), "{scheme}");
        }
    }

    #[test]
    fn same_seed_same_samples() {
        for scheme in ModulationScheme::ALL {
            let a = synthesize_burst(&params(scheme), 4096, 500e6, 1.0, 42).unwrap();
            let b = synthesize_burst(&params(scheme), 4096, 500e6, 1.0, 42).unwrap();
            let c = synthesize_burst(&params(scheme), 4096, 500e6, 1.0, 43).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, c);
            assert!(a.iq.is_finite());
        }
    }

    #[test]
    fn gain_scales_linearly() {
        for scheme in ModulationScheme::ALL {
            let a = synthesize_burst(&params(scheme), 4096, 500e6, 1.0, 9).unwrap();
            let b = synthesize_burst_with_gain(&params(scheme), 4096, 500e6, 1.0, 9, 2.0).unwrap();
            for (x, y) in a.iq.samples.iter().zip(&b.iq.samples) {
                assert_eq!(*x * 2.0, *y);
            }
            let c = synthesize_burst_with_gain(&params(scheme), 4096, 500e6, 1.0, 9, 0.37).unwrap();
            for (x, y) in a.iq.samples.iter().zip(&c.iq.samples) {
                assert!((*x * 0.37 - *y).norm() <= 1e-14 * x.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn rejects_overrun_and_too_short() {
        let mut p = params(ModulationScheme::Qpsk);
        p.start_offset = 4000;
        assert!(synthesize_burst(&p, 4096, 500e6, 1.0, 0).is_err());
        let mut p = params(ModulationScheme::OfdmQpsk);
        p.half_bw_hz = 20e6;
        p.duration_frac = 0.01;
        p.start_offset = 0;
        assert!(synthesize_burst(&p, 4096, 500e6, 1.0, 0).is_err());
        p.duration_frac = 0.0;
        assert!(synthesize_burst(&p, 4096, 500e6, 1.0, 0).is_err());
    }
}
