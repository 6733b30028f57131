use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use super::{resolve_seed, DatasetConfig, Error, Result};
use crate::annotate::{
    annotate_frame, colorize_mask, write_dataset, Annotation, CategoryRecord, DatasetManifest, ImageRecord, Provenance,
    ANNOTATIONS_FILE, MIN_ANNOTATION_PIXELS,
};
use crate::augment::REPORT_FILE;
use crate::randomizer::{Randomizer, SceneFrame};
use crate::render::{
    rasterize_with, read_instance_png, read_sidecar, write_instance_png, write_rgb_png, write_sidecar, RenderMode,
    RenderOutput,
};
use crate::scene::Category;

/// Hex SHA-256 of the resolved generation settings, used for resuming.
pub const HASH_FILE: &str = "dataset.hash";

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateOptions {
    pub seed: Option<u64>,
    /// Value of the seed environment variable, if set.
    pub seed_env: Option<String>,
    pub frames: Option<usize>,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub include_birds: bool,
    pub include_distractors: bool,
    pub render_mode: RenderMode,
    pub min_pixels: usize,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self {
            seed: None,
            seed_env: None,
            frames: None,
            jobs: 0,
            include_birds: false,
            include_distractors: false,
            render_mode: RenderMode::Full,
            min_pixels: MIN_ANNOTATION_PIXELS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateSummary {
    pub frames: usize,
    pub rendered: usize,
    pub reused: usize,
    /// Frames where no drone could be framed after every camera re-draw.
    pub empty_frames: usize,
    pub annotations: usize,
    pub hash: String,
    pub manifest_path: PathBuf,
}

/// Per-frame result before the manifest is assembled.
#[derive(Debug, Clone)]
pub struct FrameRecord {
    pub image_id: u64,
    pub annotations: Vec<Annotation>,
    pub empty_of_target: bool,
    pub rendered: bool,
}

pub fn image_file_name(index: u64) -> String {
    format!("images/frame_{index:06}.png")
}

fn mask_file_name(index: u64) -> String {
    format!("masks/frame_{index:06}.png")
}

fn ids_file_name(index: u64) -> String {
    format!("masks/frame_{index:06}_ids.png")
}

fn sidecar_file_name(index: u64) -> String {
    format!("masks/frame_{index:06}_ids.json")
}

/// Builds, renders and annotates one frame in memory. Annotation ids start at 0.
pub fn frame_annotations(
    randomizer: &Randomizer,
    master_seed: u64,
    frame_index: u64,
    mode: RenderMode,
    min_pixels: usize,
) -> Result<(SceneFrame, RenderOutput, Vec<Annotation>)> {
    let frame = randomizer.build_frame(master_seed, frame_index)?;
    let out = rasterize_with(&frame, mode);
    let anns = annotate_frame(
        &out.instance_ids,
        out.width(),
        out.height(),
        &frame.categories(),
        frame_index,
        0,
        min_pixels,
    )?;
    Ok((frame, out, anns))
}

struct Task<'a> {
    randomizer: &'a Randomizer,
    seed: u64,
    local: u64,
    global: u64,
}

fn process(task: &Task<'_>, out_dir: &Path, opts: &GenerateOptions) -> Result<FrameRecord> {
    let names = [
        image_file_name(task.global),
        mask_file_name(task.global),
        ids_file_name(task.global),
        sidecar_file_name(task.global),
    ];
    let paths: Vec<PathBuf> = names.iter().map(|n| out_dir.join(n)).collect();
    if paths.iter().all(|p| p.is_file()) {
        let frame = task.randomizer.build_frame(task.seed, task.local)?;
        let (w, h, ids) = read_instance_png(&paths[2])?;
        let categories = read_sidecar(&paths[3])?;
        let annotations = annotate_frame(&ids, w, h, &categories, task.global, 0, opts.min_pixels)?;
        return Ok(FrameRecord {
            image_id: task.global,
            annotations,
            empty_of_target: frame.empty_of_target,
            rendered: false,
        });
    }
    let frame = task.randomizer.build_frame(task.seed, task.local)?;
    let render = rasterize_with(&frame, opts.render_mode);
    let categories = frame.categories();
    write_rgb_png(&render.rgb, &paths[0])?;
    let mask = colorize_mask(&render.instance_ids, render.width(), render.height(), &categories)?;
    write_rgb_png(&mask, &paths[1])?;
    write_instance_png(&render, &paths[2])?;
    write_sidecar(&categories, &paths[3])?;
    let annotations = annotate_frame(
        &render.instance_ids,
        render.width(),
        render.height(),
        &categories,
        task.global,
        0,
        opts.min_pixels,
    )?;
    Ok(FrameRecord {
        image_id: task.global,
        annotations,
        empty_of_target: frame.empty_of_target,
        rendered: true,
    })
}

fn settings_hash(config: &DatasetConfig, seeds: &[u64], opts: &GenerateOptions) -> String {
    let n = config.parts.len();
    let parts: Vec<serde_json::Value> = config
        .parts
        .iter()
        .zip(seeds)
        .enumerate()
        .map(|(i, (p, &seed))| {
            let mut c = p.config.clone();
            c.master_seed = Some(seed);
            if i + 1 == n {
                c.dataset_size = 0;
            }
            serde_json::json!({ "config": c, "base_dir": p.base_dir })
        })
        .collect();
    let doc = serde_json::json!({
        "format": 1,
        "parts": parts,
        "include_birds": opts.include_birds,
        "include_distractors": opts.include_distractors,
        "render_mode": format!("{:?}", opts.render_mode),
        "min_pixels": opts.min_pixels,
    });
    hex::encode(Sha256::digest(doc.to_string().as_bytes()))
}

fn categories_for(config: &DatasetConfig, opts: &GenerateOptions) -> Vec<CategoryRecord> {
    let mut cats = vec![Category::Drone];
    if opts.include_birds && config.parts.iter().any(|p| p.config.style.has_birds()) {
        cats.push(Category::Bird);
    }
    if opts.include_distractors && config.parts.iter().any(|p| p.config.style.has_distractors()) {
        cats.push(Category::Distractor);
    }
    cats.into_iter().map(CategoryRecord::from).collect()
}

fn create_dir(p: &Path) -> Result<()> {
    std::fs::create_dir_all(p).map_err(|e| Error::io(p, e))
}

/// Generates (or resumes) a dataset in `out_dir`.
pub fn generate(config: DatasetConfig, out_dir: &Path, opts: &GenerateOptions) -> Result<GenerateSummary> {
    let config = match opts.frames {
        Some(n) => config.with_frames(n),
        None => config,
    };
    for p in &config.parts {
        p.config.validate()?;
    }
    let seeds = config
        .parts
        .iter()
        .map(|p| resolve_seed(opts.seed, p.config.master_seed, opts.seed_env.as_deref()))
        .collect::<Result<Vec<u64>>>()?;
    let hash = settings_hash(&config, &seeds, opts);

    create_dir(out_dir)?;
    let hash_path = out_dir.join(HASH_FILE);
    if hash_path.exists() {
        let existing = std::fs::read_to_string(&hash_path).map_err(|e| Error::io(&hash_path, e))?;
        if existing.trim() != hash {
            return Err(Error::Conflict(format!(
                "{} holds a dataset generated with different settings; use a fresh output directory",
                out_dir.display()
            )));
        }
    }
    if out_dir.join(REPORT_FILE).exists() {
        return Err(Error::Conflict(format!("{} has been augmented; regenerate into a fresh directory", out_dir.display())));
    }
    create_dir(&out_dir.join("images"))?;
    create_dir(&out_dir.join("masks"))?;
    std::fs::write(&hash_path, format!("{hash}\n")).map_err(|e| Error::io(&hash_path, e))?;

    let randomizers = config.randomizers()?;
    let mut tasks = Vec::new();
    let mut images = Vec::new();
    let mut global = 0u64;
    for ((part, r), &seed) in config.parts.iter().zip(&randomizers).zip(&seeds) {
        for local in 0..part.config.dataset_size as u64 {
            tasks.push(Task {
                randomizer: r,
                seed,
                local,
                global,
            });
            images.push(ImageRecord {
                id: global,
                file_name: image_file_name(global),
                width: part.config.image_width,
                height: part.config.image_height,
            });
            global += 1;
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Conflict(format!("thread pool: {e}")))?;
    let records: Vec<FrameRecord> = pool.install(|| tasks.par_iter().map(|t| process(t, out_dir, opts)).collect::<Result<Vec<_>>>())?;

    let mut manifest = DatasetManifest {
        provenance: Some(Provenance {
            description: "sdrforge synthetic drone dataset".into(),
            config_hash: hash.clone(),
            master_seed: seeds[0],
        }),
        images,
        annotations: records.iter().flat_map(|r| r.annotations.iter().cloned()).collect(),
        categories: Category::ALL.iter().map(|&c| CategoryRecord::from(c)).collect(),
    }
    .filtered(opts.include_birds, opts.include_distractors);
    manifest.categories = categories_for(&config, opts);
    for (i, a) in manifest.annotations.iter_mut().enumerate() {
        a.id = i as u64;
    }
    let manifest_path = write_dataset(&manifest, true, true, out_dir)?;
    debug_assert_eq!(manifest_path, out_dir.join(ANNOTATIONS_FILE));

    Ok(GenerateSummary {
        frames: records.len(),
        rendered: records.iter().filter(|r| r.rendered).count(),
        reused: records.iter().filter(|r| !r.rendered).count(),
        empty_frames: records.iter().filter(|r| r.empty_of_target).count(),
        annotations: manifest.annotations.len(),
        hash,
        manifest_path,
    })
}
