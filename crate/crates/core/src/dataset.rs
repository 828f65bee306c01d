//! Dataset assembly: images, labels and a JSON manifest, plus the STFT
//! parameter sweep grids.
//!
//! Layout of a dataset directory:
//!
//! ```text
//! images/{train,val,test}/scene_000000.png
//! labels/{train,val,test}/scene_000000.txt
//! manifest.json
//! ```
//!
//! The manifest is written last; a directory without one is incomplete.

use std::fmt;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use image::codecs::png::PngEncoder;
use image::{GrayImage, ImageEncoder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotate::{burst_to_bbox, write_labels, Annotation};
use crate::error::{Error, Result};
use crate::scenario::{render_scene, sample_scenario, SceneConfig, SceneSpec};
use crate::stft::{self, Spectrogram, StftConfig, WindowType};
use crate::synth::ModulationScheme;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Val,
    Test,
}

impl SplitName {
    pub const ALL: [SplitName; 3] = [SplitName::Train, SplitName::Val, SplitName::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Val => "val",
            SplitName::Test => "test",
        }
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(SplitName::Train),
            "val" => Ok(SplitName::Val),
            "test" => Ok(SplitName::Test),
            _ => Err(Error::invalid_input(format!("unknown split '{s}'"))),
        }
    }
}

/// Train/val/test item counts; assignment is contiguous by scene index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: usize,
    pub val: usize,
    pub test: usize,
}

impl Default for Split {
    fn default() -> Self {
        Self {
            train: 2800,
            val: 800,
            test: 400,
        }
    }
}

impl Split {
    pub fn total(&self) -> usize {
        self.train + self.val + self.test
    }

    pub fn assign(&self, index: usize) -> SplitName {
        if index < self.train {
            SplitName::Train
        } else if index < self.train + self.val {
            SplitName::Val
        } else {
            SplitName::Test
        }
    }
}

impl FromStr for Split {
    type Err = Error;

    /// `train,val,test`, e.g. `2800,800,400`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid_input(format!("bad split '{s}': {e}")))?;
        match parts.as_slice() {
            [train, val, test] => Ok(Split {
                train: *train,
                val: *val,
                test: *test,
            }),
            _ => Err(Error::invalid_input(format!("split '{s}' needs three counts"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSettings {
    pub floor_db: f64,
    pub image_height: u32,
    pub image_width: u32,
}

impl Default for RenderSettings {
    fn default() -> Self {
        Self {
            floor_db: stft::DEFAULT_FLOOR_DB,
            image_height: stft::DEFAULT_IMAGE_SIZE.0,
            image_width: stft::DEFAULT_IMAGE_SIZE.1,
        }
    }
}

/// Everything needed to (re)build one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub scene: SceneConfig,
    pub stft: StftConfig,
    pub render: RenderSettings,
    pub n_scenes: usize,
    pub split: Split,
}

impl DatasetSpec {
    pub fn validate(&self) -> Result<()> {
        self.scene.validate()?;
        self.stft.validate()?;
        if self.split.total() != self.n_scenes {
            return Err(Error::invalid_config(format!(
                "split {}+{}+{} does not add up to {} scenes",
                self.split.train, self.split.val, self.split.test, self.n_scenes
            )));
        }
        if self.render.floor_db >= 0.0 {
            return Err(Error::invalid_config("dB floor must be negative"));
        }
        if self.render.image_height == 0 || self.render.image_width == 0 {
            return Err(Error::invalid_config("image size must be nonzero"));
        }
        if self.stft.window_len > self.scene.total_samples() {
            return Err(Error::invalid_config(format!(
                "window of {} samples exceeds the {}-sample scene",
                self.stft.window_len,
                self.scene.total_samples()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestItem {
    pub index: usize,
    pub scene_seed: u64,
    pub split: SplitName,
    pub image: String,
    pub label: String,
    pub n_boxes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub spec: DatasetSpec,
    pub class_names: Vec<String>,
    pub items: Vec<ManifestItem>,
    /// Fully resolved front-end configuration, when built from the CLI.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub run_config: Option<serde_json::Value>,
}

impl DatasetManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let manifest: DatasetManifest = serde_json::from_str(&text)?;
        if manifest.format_version != FORMAT_VERSION {
            return Err(Error::Parse {
                path,
                reason: format!("unsupported format version {}", manifest.format_version),
            });
        }
        Ok(manifest)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    pub fn items_in(&self, split: SplitName) -> impl Iterator<Item = &ManifestItem> {
        self.items.iter().filter(move |i| i.split == split)
    }
}

pub fn class_names() -> Vec<String> {
    ModulationScheme::ALL.iter().map(|s| s.name().to_string()).collect()
}

pub fn scene_stem(index: usize) -> String {
    format!("scene_{index:06}")
}

/// Ground-truth boxes for every burst of a scene.
pub fn scene_annotations(scene: &SceneSpec) -> Result<Vec<Annotation>> {
    scene
        .bursts
        .iter()
        .map(|b| burst_to_bbox(b, &scene.config))
        .collect()
}

/// Samples, renders and transforms scene `index`.
pub fn scene_spectrogram(spec: &DatasetSpec, index: usize) -> Result<(SceneSpec, Spectrogram)> {
    let scene = sample_scenario(&spec.scene, index as u64);
    let (iq, _) = render_scene(&scene)?;
    let sg = stft::spectrogram(&iq, &spec.stft, spec.render.floor_db)?;
    Ok((scene, sg))
}

/// Image and labels for scene `index`.
pub fn build_item(spec: &DatasetSpec, index: usize) -> Result<(SceneSpec, GrayImage, Vec<Annotation>)> {
    let (scene, sg) = scene_spectrogram(spec, index)?;
    let img = stft::render_image(&sg, spec.render.image_height, spec.render.image_width);
    let labels = scene_annotations(&scene)?;
    Ok((scene, img, labels))
}

pub fn write_png(img: &GrayImage, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    PngEncoder::new(BufWriter::new(file))
        .write_image(img.as_raw(), img.width(), img.height(), image::ExtendedColorType::L8)
        .map_err(|source| Error::Image {
            path: path.to_path_buf(),
            source,
        })
}

/// Builds a dataset under `out_dir` on `jobs` worker threads (0 = rayon
/// default). Output is independent of `jobs`.
pub fn build_dataset(
    spec: &DatasetSpec,
    out_dir: &Path,
    jobs: usize,
    run_config: Option<serde_json::Value>,
) -> Result<DatasetManifest> {
    spec.validate()?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    if manifest_path.exists() {
        fs::remove_file(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    }
    for split in SplitName::ALL {
        for kind in ["images", "labels"] {
            let dir = out_dir.join(kind).join(split.as_str());
            fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::invalid_config(format!("cannot start worker pool: {e}")))?;
    let items: Vec<ManifestItem> = pool.install(|| {
        (0..spec.n_scenes)
            .into_par_iter()
            .map(|index| write_item(spec, out_dir, index))
            .collect::<Result<Vec<_>>>()
    })?;
    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION,
        spec: spec.clone(),
        class_names: class_names(),
        items,
        run_config,
    };
    manifest.write(out_dir)?;
    Ok(manifest)
}

fn write_item(spec: &DatasetSpec, out_dir: &Path, index: usize) -> Result<ManifestItem> {
    let (scene, img, labels) = build_item(spec, index)?;
    let split = spec.split.assign(index);
    let stem = scene_stem(index);
    let image = format!("images/{split}/{stem}.png");
    let label = format!("labels/{split}/{stem}.txt");
    write_png(&img, &out_dir.join(&image))?;
    write_labels(&labels, &out_dir.join(&label))?;
    Ok(ManifestItem {
        index,
        scene_seed: scene.scene_seed,
        split,
        image,
        label,
        n_boxes: labels.len(),
    })
}

/// Rebuilds a dataset from a manifest alone.
pub fn regenerate(manifest: &DatasetManifest, out_dir: &Path, jobs: usize) -> Result<DatasetManifest> {
    build_dataset(&manifest.spec, out_dir, jobs, manifest.run_config.clone())
}

pub fn label_path(dir: &Path, item: &ManifestItem) -> PathBuf {
    dir.join(&item.label)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    CoarseWf,
    FineWindow,
    WindowType,
    Overlap,
}

impl SweepKind {
    pub const ALL: [SweepKind; 4] = [
        SweepKind::CoarseWf,
        SweepKind::FineWindow,
        SweepKind::WindowType,
        SweepKind::Overlap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepKind::CoarseWf => "coarse_wf",
            SweepKind::FineWindow => "fine_window",
            SweepKind::WindowType => "window_type",
            SweepKind::Overlap => "overlap",
        }
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coarse" | "coarse_wf" => Ok(SweepKind::CoarseWf),
            "window" | "fine_window" => Ok(SweepKind::FineWindow),
            "wintype" | "window_type" => Ok(SweepKind::WindowType),
            "overlap" => Ok(SweepKind::Overlap),
            _ => Err(Error::invalid_input(format!(
                "unknown sweep '{s}' (expected coarse, window, wintype or overlap)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    /// Directory-safe name, e.g. `W64F256`, `hann`, `ov30`.
    pub name: String,
    pub config: StftConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub kind: SweepKind,
    pub entries: Vec<SweepEntry>,
}

/// Window length of the window-type and overlap sweeps (`sqrt(16384)`).
pub const SWEEP_BASE_WINDOW: usize = 128;

pub fn sweep_grid(kind: SweepKind) -> SweepGrid {
    let entry = |name: String, config: StftConfig| SweepEntry { name, config };
    let entries = match kind {
        SweepKind::CoarseWf => {
            let n = 16384;
            [n / 256, n / 64, n / 16, n / 4]
                .iter()
                .flat_map(|&w| {
                    [4, 16, 64, 256].map(|m| {
                        let cfg = StftConfig::new(WindowType::Hamming, w, m * w, 0.5);
                        entry(cfg.wf_label(), cfg)
                    })
                })
                .collect()
        }
        SweepKind::FineWindow => [8, 16, 32, 64, 128, 256, 1024, 4096]
            .iter()
            .map(|&w| {
                let cfg = StftConfig::new(WindowType::Hamming, w, w, 0.5);
                entry(cfg.wf_label(), cfg)
            })
            .collect(),
        SweepKind::WindowType => WindowType::ALL
            .iter()
            .map(|&win| {
                let cfg = StftConfig::new(win, SWEEP_BASE_WINDOW, SWEEP_BASE_WINDOW, 0.5);
                entry(win.name().to_string(), cfg)
            })
            .collect(),
        SweepKind::Overlap => (1..=9)
            .map(|i| {
                let cfg = StftConfig::new(
                    WindowType::Hamming,
                    SWEEP_BASE_WINDOW,
                    SWEEP_BASE_WINDOW,
                    f64::from(i) / 10.0,
                );
                entry(format!("ov{}", i * 10), cfg)
            })
            .collect(),
    };
    SweepGrid { kind, entries }
}
