//! Run configuration: optional TOML file, then command-line flags on top.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};
use stftsweep_core::dataset::{DatasetSpec, RenderSettings, Split};
use stftsweep_core::scenario::SceneConfig;
use stftsweep_core::stft::{StftConfig, WindowType};

/// Keys accepted in a `--config` file. Every flag has a key of the same name;
/// `[scene]` and `[render]` tables override individual scene and image
/// settings.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenes: Option<usize>,
    pub split: Option<String>,
    pub seed: Option<u64>,
    pub stft: Option<String>,
    pub sweep: Option<String>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub scene: Option<SceneConfig>,
    pub render: Option<RenderSettings>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML file with defaults for any of these flags
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Number of scenes to generate
    #[arg(long)]
    pub scenes: Option<usize>,

    /// Train,val,test counts, e.g. 2800,800,400 (default: 70/20/10 of --scenes)
    #[arg(long, value_name = "TRAIN,VAL,TEST")]
    pub split: Option<String>,

    /// Master seed for scene generation
    #[arg(long)]
    pub seed: Option<u64>,

    /// STFT settings as W,F,window,overlap, e.g. 128,128,hamming,0.5
    #[arg(long, value_name = "W,F,WINDOW,OVERLAP")]
    pub stft: Option<String>,

    /// Worker threads (0 = one per core)
    #[arg(long, env = "STFTSWEEP_JOBS")]
    pub jobs: Option<usize>,
}

/// Fully resolved settings, echoed into every manifest. Output location and
/// thread count are left out so they never change the dataset bytes.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub config_file: Option<PathBuf>,
    #[serde(skip)]
    pub out: PathBuf,
    #[serde(skip)]
    pub jobs: usize,
    pub sweep: Option<String>,
    pub spec: DatasetSpec,
}

pub const DEFAULT_SCENES: usize = 4000;

/// 70/20/10 split of `n` scenes, test taking the remainder.
pub fn default_split(n: usize) -> Split {
    let train = n * 7 / 10;
    let val = n * 2 / 10;
    Split {
        train,
        val,
        test: n - train - val,
    }
}

pub fn parse_stft(s: &str) -> Result<StftConfig> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [w, f, window, overlap] = parts.as_slice() else {
        bail!("--stft expects W,F,window,overlap, got '{s}'");
    };
    let cfg = StftConfig::new(
        window.parse::<WindowType>()?,
        w.parse().with_context(|| format!("bad window length '{w}'"))?,
        f.parse().with_context(|| format!("bad FFT size '{f}'"))?,
        overlap.parse().with_context(|| format!("bad overlap '{overlap}'"))?,
    );
    cfg.validate()?;
    Ok(cfg)
}

impl CommonArgs {
    /// Merges flags over the config file. Returns the file too, for keys
    /// only some subcommands use.
    pub fn resolve(
        &self,
        command: &str,
        out: Option<PathBuf>,
        default_out: &str,
    ) -> Result<(RunConfig, FileConfig)> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let mut scene = file.scene.clone().unwrap_or_default();
        if let Some(seed) = self.seed.or(file.seed) {
            scene.master_seed = seed;
        }
        let n_scenes = self.scenes.or(file.scenes).unwrap_or(DEFAULT_SCENES);
        let split = match self.split.as_ref().or(file.split.as_ref()) {
            Some(s) => s.parse::<Split>()?,
            None if n_scenes == DEFAULT_SCENES => Split::default(),
            None => default_split(n_scenes),
        };
        let stft = match self.stft.as_ref().or(file.stft.as_ref()) {
            Some(s) => parse_stft(s)?,
            None => StftConfig::default(),
        };
        let spec = DatasetSpec {
            scene,
            stft,
            render: file.render.unwrap_or_default(),
            n_scenes,
            split,
        };
        spec.validate()?;
        let run = RunConfig {
            command: command.to_string(),
            config_file: self.config.clone(),
            out: out
                .or_else(|| file.out.clone())
                .unwrap_or_else(|| PathBuf::from(default_out)),
            jobs: self.jobs.or(file.jobs).unwrap_or(0),
            sweep: None,
            spec,
        };
        Ok((run, file))
    }
}
