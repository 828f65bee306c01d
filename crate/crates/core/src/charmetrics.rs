//! Dataset characterization: resolution ratios, time-frequency skewness and
//! the square-root window heuristic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::SceneConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationInputs {
    /// Narrowest double-sided signal bandwidth.
    pub bw_min_hz: f64,
    pub bw_sample_hz: f64,
    /// Shortest burst as a fraction of one timeslot.
    pub duration_min_frac: f64,
    pub n_timeslots: usize,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Characterization {
    /// Frequency resolution ratio `bw_min / bw_sample`.
    pub r_f: f64,
    /// Time resolution ratio `duration_min / n_timeslots`.
    pub r_t: f64,
    /// Time-frequency skewness `r_t / r_f`.
    pub skewness: f64,
    /// `sqrt(n_samples)` rounded to the nearest power of two.
    pub w_opt: usize,
    pub inputs: CharacterizationInputs,
}

/// Nearest power of two to `x` on a log scale.
pub fn nearest_power_of_two(x: f64) -> usize {
    1usize << x.log2().round().max(0.0) as u32
}

pub fn characterize_inputs(inputs: CharacterizationInputs) -> Result<Characterization> {
    if !(inputs.bw_sample_hz > 0.0) {
        return Err(Error::invalid_config("sampling bandwidth must be positive"));
    }
    if inputs.n_timeslots == 0 || inputs.n_samples == 0 {
        return Err(Error::invalid_config("timeslot and sample counts must be nonzero"));
    }
    let r_f = inputs.bw_min_hz / inputs.bw_sample_hz;
    let r_t = inputs.duration_min_frac / inputs.n_timeslots as f64;
    Ok(Characterization {
        r_f,
        r_t,
        skewness: r_t / r_f,
        w_opt: nearest_power_of_two((inputs.n_samples as f64).sqrt()),
        inputs,
    })
}

/// Characterizes the dataset a scene configuration generates. The minimum
/// bandwidth is taken double-sided (twice the smallest half bandwidth).
pub fn characterize(cfg: &SceneConfig) -> Result<Characterization> {
    characterize_inputs(CharacterizationInputs {
        bw_min_hz: 2.0 * cfg.half_bw_hz.min,
        bw_sample_hz: cfg.sample_rate_hz,
        duration_min_frac: cfg.duration_frac.min,
        n_timeslots: cfg.n_timeslots,
        n_samples: cfg.total_samples(),
    })
}

impl Characterization {
    /// Multi-line `key=value` report.
    pub fn report(&self) -> String {
        format!(
            "r_f={}\nr_t={}\nmu_tf={}\nw_opt={}\n",
            self.r_f, self.r_t, self.skewness, self.w_opt
        )
    }
}
