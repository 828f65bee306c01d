use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use stftsweep_core::annotate::{read_labels, Annotation};
use stftsweep_core::charmetrics::characterize;
use stftsweep_core::dataset::{
    build_dataset, build_item, label_path, scene_spectrogram, scene_stem, sweep_grid,
    DatasetManifest, DatasetSpec, ManifestItem, SplitName, SweepKind,
};
use stftsweep_core::eval::{
    collapse_classes, detect_energy_with, map_scores, read_predictions, write_predictions, Detection,
    DetectorConfig, MapReport,
};

mod config;
mod preview;

use config::{CommonArgs, FileConfig, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "stftsweep", version, about = "Synthetic RF spectrogram datasets for STFT parameter sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate one dataset
    Generate {
        #[command(flatten)]
        common: CommonArgs,
        /// Output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate one dataset per entry of an STFT sweep grid
    Sweep {
        /// coarse, window, wintype or overlap
        #[arg(long, visible_alias = "sweep")]
        kind: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
        /// Parent directory; each grid entry gets its own subdirectory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print resolution ratios, time-frequency skewness and suggested window
    Characterize {
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Print JSON instead of key=value lines
        #[arg(long)]
        json: bool,
    },
    /// Score predictions (or the built-in energy detector) against a dataset
    #[command(group(ArgGroup::new("source").required(true).args(["pred", "baseline"])))]
    Evaluate {
        #[arg(long)]
        dataset: PathBuf,
        /// Directory of `class cx cy w h score` files named like the labels
        #[arg(long)]
        pred: Option<PathBuf>,
        /// Run the energy detector on regenerated spectrograms (class-agnostic)
        #[arg(long)]
        baseline: bool,
        /// train, val, test or all
        #[arg(long, default_value = "test")]
        split: String,
        /// Merge all classes before scoring
        #[arg(long)]
        agnostic: bool,
        /// JSON report path (default: DATASET/report_SPLIT.json)
        #[arg(long)]
        report: Option<PathBuf>,
        /// Also write baseline detections here
        #[arg(long, requires = "baseline")]
        save_pred: Option<PathBuf>,
        #[arg(long, env = "STFTSWEEP_JOBS", default_value_t = 0)]
        jobs: usize,
    },
    /// Render one scene with its label boxes drawn in
    Preview {
        #[command(flatten)]
        common: CommonArgs,
        /// Take scene and STFT settings from this dataset's manifest
        #[arg(long, conflicts_with_all = ["config", "scenes", "split", "seed", "stft"])]
        dataset: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Output PNG
        #[arg(long, default_value = "preview.png")]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        thickness: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stftsweep: error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate { common, out } => {
            let (run, _) = common.resolve("generate", out, "dataset")?;
            generate(&run, &run.out)
        }
        Command::Sweep { kind, common, out } => {
            if common.stft.is_some() {
                bail!("--stft cannot be combined with sweep; the grid sets the STFT parameters");
            }
            let (run, file) = common.resolve("sweep", out, "sweep")?;
            let kind = kind
                .or(file.sweep)
                .context("sweep needs --kind (coarse, window, wintype or overlap)")?;
            sweep(run, kind.parse()?)
        }
        Command::Characterize { config, json } => {
            let file = match &config {
                Some(p) => FileConfig::load(p)?,
                None => FileConfig::default(),
            };
            let scene = file.scene.unwrap_or_default();
            scene.validate()?;
            let c = characterize(&scene)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&c)?);
            } else {
                print!("{}", c.report());
            }
            Ok(())
        }
        Command::Evaluate {
            dataset,
            pred,
            baseline,
            split,
            agnostic,
            report,
            save_pred,
            jobs,
        } => {
            let source = match pred {
                Some(dir) => Source::Files(dir),
                None => {
                    debug_assert!(baseline);
                    Source::Baseline(save_pred)
                }
            };
            evaluate(&dataset, source, &split, agnostic, report, jobs)
        }
        Command::Preview {
            common,
            dataset,
            index,
            out,
            thickness,
        } => {
            let spec = match dataset {
                Some(dir) => DatasetManifest::read(&dir)?.spec,
                None => common.resolve("preview", None, ".")?.0.spec,
            };
            let (_, img, labels) = build_item(&spec, index)?;
            let rgb = preview::draw_boxes(&img, &labels, thickness);
            rgb.save(&out)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("scene {index}: {} boxes -> {}", labels.len(), out.display());
            Ok(())
        }
    }
}

fn generate(run: &RunConfig, out: &Path) -> Result<()> {
    let echo = serde_json::to_value(run)?;
    let manifest = build_dataset(&run.spec, out, run.jobs, Some(echo))
        .with_context(|| format!("building dataset in {}", out.display()))?;
    let s = &run.spec.split;
    println!(
        "{}: {} scenes ({}/{}/{}) {}",
        out.display(),
        manifest.items.len(),
        s.train,
        s.val,
        s.test,
        run.spec.stft
    );
    Ok(())
}

fn sweep(run: RunConfig, kind: SweepKind) -> Result<()> {
    let grid = sweep_grid(kind);
    for entry in &grid.entries {
        let entry_run = RunConfig {
            sweep: Some(format!("{}/{}", kind.name(), entry.name)),
            spec: DatasetSpec {
                stft: entry.config,
                ..run.spec.clone()
            },
            ..run.clone()
        };
        generate(&entry_run, &run.out.join(&entry.name))?;
    }
    Ok(())
}

enum Source {
    Files(PathBuf),
    Baseline(Option<PathBuf>),
}

#[derive(Serialize)]
struct EvalReport<'a> {
    dataset: &'a Path,
    split: &'a str,
    n_images: usize,
    class_agnostic: bool,
    predictions: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    detector: Option<DetectorConfig>,
    #[serde(flatten)]
    scores: &'a MapReport,
}

fn prediction_file(dir: &Path, item: &ManifestItem) -> Option<PathBuf> {
    let name = format!("{}.txt", scene_stem(item.index));
    [dir.join(&name), dir.join(item.split.as_str()).join(&name)]
        .into_iter()
        .find(|p| p.is_file())
}

fn evaluate(
    dataset: &Path,
    source: Source,
    split: &str,
    agnostic: bool,
    report_path: Option<PathBuf>,
    jobs: usize,
) -> Result<()> {
    let manifest = DatasetManifest::read(dataset)
        .with_context(|| format!("{} is not a finished dataset", dataset.display()))?;
    let items: Vec<&ManifestItem> = if split == "all" {
        manifest.items.iter().collect()
    } else {
        manifest.items_in(split.parse::<SplitName>()?).collect()
    };
    if items.is_empty() {
        bail!("dataset has no '{split}' images");
    }
    let truth: Vec<Vec<Annotation>> = items
        .iter()
        .map(|item| read_labels(&label_path(dataset, item)))
        .collect::<stftsweep_core::Result<_>>()?;

    let detector = DetectorConfig::default();
    let (detections, description, class_agnostic) = match &source {
        Source::Files(dir) => {
            let mut missing = 0;
            let mut dets = Vec::with_capacity(items.len());
            for item in &items {
                match prediction_file(dir, item) {
                    Some(p) => dets.push(read_predictions(&p)?),
                    None => {
                        missing += 1;
                        dets.push(Vec::new());
                    }
                }
            }
            if missing > 0 {
                eprintln!(
                    "stftsweep: warning: {missing} of {} images have no prediction file; scored as empty",
                    items.len()
                );
            }
            (dets, dir.display().to_string(), agnostic)
        }
        Source::Baseline(save) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
            let dets: Vec<Vec<Detection>> = pool.install(|| {
                items
                    .par_iter()
                    .map(|item| {
                        let (scene, sg) = scene_spectrogram(&manifest.spec, item.index)?;
                        if scene.scene_seed != item.scene_seed {
                            bail!("scene {} does not match its manifest seed", item.index);
                        }
                        Ok(detect_energy_with(&sg, &detector))
                    })
                    .collect::<Result<_>>()
            })?;
            if let Some(dir) = save {
                std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                for (item, d) in items.iter().zip(&dets) {
                    write_predictions(d, &dir.join(format!("{}.txt", scene_stem(item.index))))?;
                }
            }
            (dets, "baseline energy detector".to_string(), true)
        }
    };

    let scores = if class_agnostic {
        let (d, g) = collapse_classes(&detections, &truth);
        map_scores(&d, &g, 1)?
    } else {
        map_scores(&detections, &truth, manifest.class_names.len() as u32)?
    };
    let report = EvalReport {
        dataset,
        split,
        n_images: items.len(),
        class_agnostic,
        predictions: description,
        detector: matches!(source, Source::Baseline(_)).then_some(detector),
        scores: &scores,
    };
    let path = report_path.unwrap_or_else(|| dataset.join(format!("report_{split}.json")));
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;

    let names = &manifest.class_names;
    let label = |c: u32| {
        if class_agnostic {
            "signal".to_string()
        } else {
            names.get(c as usize).cloned().unwrap_or_else(|| c.to_string())
        }
    };
    print!("{}", scores.table(&label));
    eprintln!("report written to {}", path.display());
    Ok(())
}
