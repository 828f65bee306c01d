//! Congested multi-emitter scenes: random layout sampling and rendering.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, tag};
use crate::synth::{self, BurstParams, IqBuffer, ModulationScheme};

/// Closed interval `[min, max]` sampled uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span<T> {
    pub min: T,
    pub max: T,
}

impl<T> Span<T> {
    pub const fn new(min: T, max: T) -> Self {
        Self { min, max }
    }
}

impl Span<f64> {
    fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.min <= self.max
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub sample_rate_hz: f64,
    pub timeslot_len: usize,
    pub n_timeslots: usize,
    pub carrier_hz: Span<f64>,
    pub half_bw_hz: Span<f64>,
    pub duration_frac: Span<f64>,
    pub snr_db: Span<f64>,
    pub emitters_per_timeslot: Span<usize>,
    pub master_seed: u64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: 500e6,
            timeslot_len: 4096,
            n_timeslots: 4,
            carrier_hz: Span::new(100e6, 400e6),
            half_bw_hz: Span::new(20e6, 100e6),
            duration_frac: Span::new(0.2, 1.0),
            snr_db: Span::new(0.0, 25.0),
            emitters_per_timeslot: Span::new(1, 8),
            master_seed: 0,
        }
    }
}

impl SceneConfig {
    pub fn total_samples(&self) -> usize {
        self.timeslot_len * self.n_timeslots
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::invalid_config(msg));
        if !(self.sample_rate_hz > 0.0 && self.sample_rate_hz.is_finite()) {
            return bad(format!("sample rate {} must be positive", self.sample_rate_hz));
        }
        if self.timeslot_len == 0 || self.n_timeslots == 0 {
            return bad("timeslot length and count must be nonzero".into());
        }
        for (name, span) in [
            ("carrier_hz", self.carrier_hz),
            ("half_bw_hz", self.half_bw_hz),
            ("duration_frac", self.duration_frac),
            ("snr_db", self.snr_db),
        ] {
            if !span.is_valid() {
                return bad(format!("{name} range [{}, {}] is empty", span.min, span.max));
            }
        }
        if self.carrier_hz.min < 0.0 || self.carrier_hz.max > self.sample_rate_hz {
            return bad("carrier range must lie inside [0, sample_rate]".into());
        }
        if self.half_bw_hz.min <= 0.0 {
            return bad("half bandwidth must be positive".into());
        }
        if self.duration_frac.min <= 0.0 || self.duration_frac.max > 1.0 {
            return bad("duration fraction must lie in (0, 1]".into());
        }
        let e = self.emitters_per_timeslot;
        if e.min > e.max {
            return bad(format!("emitter range [{}, {}] is empty", e.min, e.max));
        }
        let shortest = (self.duration_frac.min * self.timeslot_len as f64).floor();
        let longest_symbol = ModulationScheme::ALL
            .iter()
            .map(|&s| synth::symbol_period_samples(s, self.half_bw_hz.min, self.sample_rate_hz))
            .fold(0.0, f64::max);
        if shortest < longest_symbol.max(1.0) {
            return bad(format!(
                "shortest burst ({shortest} samples) is shorter than one symbol ({longest_symbol:.1} samples)"
            ));
        }
        Ok(())
    }
}

/// One ground-truth transmission in a scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterBurst {
    pub burst: BurstParams,
    pub timeslot_index: usize,
    pub class_id: u32,
    /// Seed of the burst's payload stream.
    pub seed: u64,
}

impl EmitterBurst {
    pub fn len(&self, cfg: &SceneConfig) -> usize {
        self.burst.len(cfg.timeslot_len)
    }

    /// First sample of the burst in scene coordinates.
    pub fn scene_start(&self, cfg: &SceneConfig) -> usize {
        self.timeslot_index * cfg.timeslot_len + self.burst.start_offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub config: SceneConfig,
    pub scene_index: u64,
    pub scene_seed: u64,
    pub bursts: Vec<EmitterBurst>,
}

pub fn scene_seed(master_seed: u64, scene_index: u64) -> u64 {
    seed::mix(master_seed, scene_index, tag::SCENE)
}

/// Draws the burst layout of scene `scene_index`.
pub fn sample_scenario(config: &SceneConfig, scene_index: u64) -> SceneSpec {
    let scene_seed = scene_seed(config.master_seed, scene_index);
    let mut rng = seed::rng(seed::mix(scene_seed, 0, tag::LAYOUT));
    let mut bursts = Vec::new();
    let uniform = |rng: &mut rand_chacha::ChaCha8Rng, s: Span<f64>| rng.random_range(s.min..=s.max);
    for slot in 0..config.n_timeslots {
        let count = rng.random_range(
            config.emitters_per_timeslot.min..=config.emitters_per_timeslot.max,
        );
        for _ in 0..count {
            let scheme = ModulationScheme::ALL[rng.random_range(0..ModulationScheme::ALL.len())];
            let carrier_hz = uniform(&mut rng, config.carrier_hz);
            let half_bw_hz = uniform(&mut rng, config.half_bw_hz);
            let duration_frac = uniform(&mut rng, config.duration_frac);
            let snr_db = uniform(&mut rng, config.snr_db);
            let mut burst = BurstParams {
                scheme,
                carrier_hz,
                half_bw_hz,
                duration_frac,
                snr_db,
                start_offset: 0,
            };
            let len = burst.len(config.timeslot_len);
            burst.start_offset = rng.random_range(0..=config.timeslot_len - len);
            let index = bursts.len() as u64;
            bursts.push(EmitterBurst {
                burst,
                timeslot_index: slot,
                class_id: scheme.class_id(),
                seed: seed::mix(scene_seed, index, tag::BURST),
            });
        }
    }
    SceneSpec {
        config: config.clone(),
        scene_index,
        scene_seed,
        bursts,
    }
}

/// Per-sample noise power of every rendered scene.
pub const NOISE_POWER: f64 = 1.0;

/// Complex white Gaussian noise with unit per-sample power.
pub fn noise(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = seed::rng(seed);
    let sigma = (NOISE_POWER / 2.0).sqrt();
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * sigma, im * sigma)
        })
        .collect()
}

/// Adds a scene's bursts onto `buffer` without noise.
pub fn add_bursts(spec: &SceneSpec, buffer: &mut [Complex64]) -> Result<()> {
    let cfg = &spec.config;
    for eb in &spec.bursts {
        let burst = synth::synthesize_burst(
            &eb.burst,
            cfg.timeslot_len,
            cfg.sample_rate_hz,
            NOISE_POWER,
            eb.seed,
        )?;
        let start = eb.scene_start(cfg);
        for (dst, src) in buffer[start..start + burst.len].iter_mut().zip(&burst.iq.samples) {
            *dst += src;
        }
    }
    Ok(())
}

/// Renders noise plus every burst at its scene position.
pub fn render_scene(spec: &SceneSpec) -> Result<(IqBuffer, Vec<EmitterBurst>)> {
    let cfg = &spec.config;
    let mut samples = noise(cfg.total_samples(), seed::mix(spec.scene_seed, 0, tag::NOISE));
    add_bursts(spec, &mut samples)?;
    Ok((IqBuffer::new(samples, cfg.sample_rate_hz), spec.bursts.clone()))
}
