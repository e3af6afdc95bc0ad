//! Pipeline orchestration over recorded frame sequences: per-frame skin
//! filtering, held-pose watching, template enrollment, and batch
//! evaluation.

use std::path::{Path, PathBuf};

use crate::classifier::{classify, RecognitionResult, Template, TemplateDb};
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::imaging::{
    largest_component, masked_gray, resize_bilinear, rgb_to_hsv, skin_mask, smooth_mask, GrayFrame,
    RgbFrame,
};
use crate::netpbm::decode_image;
use crate::temporal::DetectorState;

/// Ordered image paths; file-name order defines time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSequence {
    paths: Vec<PathBuf>,
}

impl FrameSequence {
    pub fn new(paths: Vec<PathBuf>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::NoFrames { dir: PathBuf::new() });
        }
        Ok(Self { paths })
    }

    /// Collects `.ppm`/`.pgm` files from a directory, sorted by path.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let entries = std::fs::read_dir(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let mut paths = Vec::new();
        for entry in entries {
            let entry = entry.map_err(|source| Error::Io {
                path: dir.to_path_buf(),
                source,
            })?;
            let path = entry.path();
            let is_image = path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("ppm") || e.eq_ignore_ascii_case("pgm"));
            if path.is_file() && is_image {
                paths.push(path);
            }
        }
        if paths.is_empty() {
            return Err(Error::NoFrames { dir: dir.to_path_buf() });
        }
        paths.sort();
        Ok(Self { paths })
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.paths
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Skin-filter chain for one frame: HSV conversion, thresholding, binary
/// smoothing, largest blob, masked grayscale. Full resolution; resizing
/// happens at feature extraction time.
pub fn run_pipeline_frame(frame: &RgbFrame, cfg: &PipelineConfig) -> Result<GrayFrame> {
    let hsv = rgb_to_hsv(frame);
    let mask = skin_mask(&hsv, &cfg.skin);
    let smoothed = smooth_mask(&mask, cfg.morph_radius);
    let hand = largest_component(&smoothed);
    masked_gray(frame, &hand)
}

fn features_of_gray(
    gray: &GrayFrame,
    cfg: &PipelineConfig,
) -> Result<crate::features::FeatureVector> {
    let resized = resize_bilinear(gray, cfg.resize_to, cfg.resize_to);
    extract_features(&resized)
}

/// Decodes one image and runs the single-frame recognition path.
pub fn recognize_image(
    path: impl AsRef<Path>,
    db: &TemplateDb,
    cfg: &PipelineConfig,
) -> Result<RecognitionResult> {
    let frame = decode_image(path)?;
    let gray = run_pipeline_frame(&frame, cfg)?;
    let features = features_of_gray(&gray, cfg)?;
    classify(&features, db)
}

/// Replays a sequence through the held-pose detector; classifies the
/// triggering frame each time the detector fires. Returns one
/// `(frame index, result)` record per trigger.
pub fn watch(
    seq: &FrameSequence,
    db: &TemplateDb,
    cfg: &PipelineConfig,
) -> Result<Vec<(usize, RecognitionResult)>> {
    if db.is_empty() {
        return Err(Error::EmptyDb);
    }
    let mut detector = DetectorState::new(cfg.n_trigger, cfg.tau_hist, cfg.similarity_sense)?;
    let mut dims: Option<(u32, u32)> = None;
    let mut out = Vec::new();
    for (index, path) in seq.paths.iter().enumerate() {
        let frame = decode_image(path)?;
        match dims {
            None => dims = Some((frame.width(), frame.height())),
            Some((w, h)) if (w, h) != (frame.width(), frame.height()) => {
                return Err(Error::DimensionMismatch {
                    expected_w: w,
                    expected_h: h,
                    actual_w: frame.width(),
                    actual_h: frame.height(),
                });
            }
            _ => {}
        }
        let gray = run_pipeline_frame(&frame, cfg)?;
        if detector.step(&gray)? {
            let features = features_of_gray(&gray, cfg)?;
            out.push((index, classify(&features, db)?));
        }
    }
    Ok(out)
}

/// Builds a template per training image. Database order is label-sorted,
/// then file order within each label, so enrollment is reproducible.
pub fn enroll(sets: &[(String, FrameSequence)], cfg: &PipelineConfig) -> Result<TemplateDb> {
    let mut sorted: Vec<&(String, FrameSequence)> = sets.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut db = TemplateDb::new();
    for (label, seq) in sorted {
        for path in seq.paths() {
            let frame = decode_image(path)?;
            let gray = run_pipeline_frame(&frame, cfg)?;
            let features = features_of_gray(&gray, cfg)?;
            db.push(Template::new(
                label.clone(),
                features,
                path.to_string_lossy().into_owned(),
            )?);
        }
    }
    Ok(db)
}

/// Classifies every test image through the single-frame path and tallies
/// per-symbol success counts.
pub fn evaluate(
    sets: &[(String, FrameSequence)],
    db: &TemplateDb,
    cfg: &PipelineConfig,
) -> Result<crate::report::EvalReport> {
    if db.is_empty() {
        return Err(Error::EmptyDb);
    }
    let mut sorted: Vec<&(String, FrameSequence)> = sets.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    let mut rows = Vec::new();
    for (label, seq) in sorted {
        let mut attempted = 0u64;
        let mut correct = 0u64;
        for path in seq.paths() {
            let result = recognize_image(path, db, cfg)?;
            attempted += 1;
            if result.label == *label {
                correct += 1;
            }
        }
        rows.push(crate::report::EvalRow {
            symbol: label.clone(),
            attempted,
            correct,
        });
    }
    Ok(crate::report::EvalReport::new(rows))
}

/// One `(label, sequence)` pair per subdirectory of `root`, sorted by
/// label. Subdirectory names are the labels.
pub fn labeled_sequences_from_dir(root: impl AsRef<Path>) -> Result<Vec<(String, FrameSequence)>> {
    let root = root.as_ref();
    let entries = std::fs::read_dir(root).map_err(|source| Error::Io {
        path: root.to_path_buf(),
        source,
    })?;
    let mut dirs: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io {
            path: root.to_path_buf(),
            source,
        })?;
        if entry.path().is_dir() {
            dirs.push(entry.path());
        }
    }
    if dirs.is_empty() {
        return Err(Error::NoFrames { dir: root.to_path_buf() });
    }
    dirs.sort();
    let mut sets = Vec::new();
    for dir in dirs {
        let label = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        sets.push((label, FrameSequence::from_dir(&dir)?));
    }
    Ok(sets)
}
