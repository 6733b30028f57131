//! `sdrforge` command line: generate, augment, evaluate, aggregate, preview.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sdrforge::augment::AugmentationPlan;
use sdrforge::coco::Strictness;
use sdrforge::metrics::{EvalParams, EvalResult};
use sdrforge::pipeline::{self, Error, GenerateOptions, SEED_ENV};
use sdrforge::render::RenderMode;
use sdrforge::stats::DEFAULT_LEVEL;

#[derive(Debug, Parser)]
#[command(name = "sdrforge", version, about = "Synthetic drone-detection dataset foundry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a dataset (images, masks, COCO annotations) from a config.
    Generate(GenerateArgs),
    /// Apply JPEG and noise augmentation to a generated dataset in place.
    Augment(AugmentArgs),
    /// Score a COCO results file against COCO ground truth.
    Evaluate(EvaluateArgs),
    /// Summarize repeated evaluation runs as mean and confidence interval.
    Aggregate(AggregateArgs),
    /// Draw a grid of frames with their ground-truth boxes.
    Preview(PreviewArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed; falls back to SDRFORGE_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides dataset_size.
    #[arg(long)]
    frames: Option<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long)]
    include_birds: bool,
    #[arg(long)]
    include_distractors: bool,
    /// Skip shading; images are black but masks and annotations are exact.
    #[arg(long)]
    geometry_only: bool,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Plan JSON; the default plan (JPEG + noise on half the images) when omitted.
    #[arg(long)]
    plan: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Accept unknown keys in either file.
    #[arg(long)]
    lenient: bool,
    /// Restrict evaluation to these category ids (repeatable).
    #[arg(long = "category")]
    categories: Vec<u32>,
    /// Row label for the printed table.
    #[arg(long, default_value = "result")]
    label: String,
}

#[derive(Debug, Args)]
struct AggregateArgs {
    #[arg(long)]
    runs: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LEVEL)]
    level: f64,
}

#[derive(Debug, Args)]
struct PreviewArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4)]
    cells: u32,
}

fn require_file(p: &Path) -> pipeline::Result<()> {
    if p.is_file() {
        Ok(())
    } else {
        Err(Error::io(p, "no such file"))
    }
}

fn require_dir(p: &Path) -> pipeline::Result<()> {
    if p.is_dir() {
        Ok(())
    } else {
        Err(Error::io(p, "no such directory"))
    }
}

fn run(command: Command) -> pipeline::Result<()> {
    match command {
        Command::Generate(a) => {
            require_file(&a.config)?;
            let config = pipeline::load_dataset_config(&a.config)?;
            let opts = GenerateOptions {
                seed: a.seed,
                seed_env: std::env::var(SEED_ENV).ok(),
                frames: a.frames,
                jobs: a.jobs,
                include_birds: a.include_birds,
                include_distractors: a.include_distractors,
                render_mode: if a.geometry_only { RenderMode::GeometryOnly } else { RenderMode::Full },
                ..Default::default()
            };
            let s = pipeline::generate(config, &a.out, &opts)?;
            println!(
                "generated {} frames ({} rendered, {} reused, {} without a drone), {} annotations -> {}",
                s.frames,
                s.rendered,
                s.reused,
                s.empty_frames,
                s.annotations,
                s.manifest_path.display()
            );
        }
        Command::Augment(a) => {
            require_dir(&a.dataset)?;
            let plan = match &a.plan {
                Some(p) => {
                    require_file(p)?;
                    pipeline::load_plan(p)?
                }
                None => AugmentationPlan::default(),
            };
            let r = pipeline::augment_dataset(&a.dataset, &plan)?;
            println!("augmented {} of {} images", r.entries.len(), r.images_total);
        }
        Command::Evaluate(a) => {
            require_file(&a.gt)?;
            require_file(&a.pred)?;
            let strictness = if a.lenient { Strictness::Lenient } else { Strictness::Strict };
            let params = EvalParams {
                category_ids: (!a.categories.is_empty()).then_some(a.categories),
            };
            let r = pipeline::evaluate_files(&a.gt, &a.pred, a.out.as_deref(), strictness, &params)?;
            print!("{}", EvalResult::table(&[(a.label, r)]));
        }
        Command::Aggregate(a) => {
            require_dir(&a.runs)?;
            let t = pipeline::aggregate_dir(&a.runs, &a.out, a.level)?;
            print!("{}", t.pivot());
        }
        Command::Preview(a) => {
            require_dir(&a.dataset)?;
            let n = pipeline::preview(&a.dataset, &a.out, a.cells)?;
            println!("wrote {} frames to {}", n, a.out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("sdrforge: error[{}]: {}", e.kind(), msg);
            ExitCode::FAILURE
        }
    }
}
