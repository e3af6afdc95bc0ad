//! Pipeline configuration and the `key = value` config file format.

use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::SkinThresholds;
use crate::temporal::{SimilaritySense, HIST_BINS};

/// Every tunable of the recognition pipeline. The histogram bin count and
/// the number of kept eigenpairs are fixed in this format version but are
/// still present so config files can state them explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub skin: SkinThresholds,
    /// Radius of the square structuring element for mask smoothing.
    pub morph_radius: u32,
    pub hist_bins: u32,
    /// Histogram distance at or below which consecutive frames count as
    /// similar (sense `below`).
    pub tau_hist: f64,
    /// Consecutive similar pairs required to declare a held sign.
    pub n_trigger: u32,
    /// Side of the square frame handed to feature extraction.
    pub resize_to: u32,
    pub top_k: u32,
    pub similarity_sense: SimilaritySense,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            skin: SkinThresholds::default(),
            morph_radius: 1,
            hist_bins: HIST_BINS as u32,
            tau_hist: 0.05,
            n_trigger: 17,
            resize_to: 70,
            top_k: crate::features::TOP_K as u32,
            similarity_sense: SimilaritySense::Below,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::ConfigInvalid { reason });
        if self.n_trigger < 1 {
            return fail("n_trigger must be at least 1".into());
        }
        if self.tau_hist.is_nan() || self.tau_hist <= 0.0 {
            return fail(format!("tau_hist must be positive, got {}", self.tau_hist));
        }
        if self.resize_to < 2 {
            return fail(format!("resize_to must be at least 2, got {}", self.resize_to));
        }
        if self.morph_radius < 1 {
            return fail("morph_radius must be at least 1".into());
        }
        if self.hist_bins != HIST_BINS as u32 {
            return fail(format!("hist_bins is fixed at {HIST_BINS} in this version"));
        }
        if self.top_k != crate::features::TOP_K as u32 {
            return fail(format!(
                "top_k is fixed at {} in this version",
                crate::features::TOP_K
            ));
        }
        if self.skin.s_min > self.skin.s_max || self.skin.v_min > self.skin.v_max {
            return fail("skin saturation/value bounds must be ordered".into());
        }
        Ok(())
    }

    /// Parses `key = value` lines. Blank lines and `#` comments are skipped;
    /// unknown keys are errors. Later assignments win.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    line: line_no,
                    reason: format!("expected `key = value`, got {line:?}"),
                });
            };
            let key = key.trim();
            // inline comments after the value are allowed
            let value = value.split('#').next().unwrap_or(value).trim();
            cfg.assign(key, value).map_err(|reason| Error::Config {
                line: line_no,
                reason,
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    fn assign(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .parse()
                .map_err(|_| format!("invalid value {value:?} for {key}"))
        }
        match key {
            "skin_h_min" => self.skin.h_min = parse(key, value)?,
            "skin_h_max" => self.skin.h_max = parse(key, value)?,
            "skin_s_min" => self.skin.s_min = parse(key, value)?,
            "skin_s_max" => self.skin.s_max = parse(key, value)?,
            "skin_v_min" => self.skin.v_min = parse(key, value)?,
            "skin_v_max" => self.skin.v_max = parse(key, value)?,
            "morph_radius" => self.morph_radius = parse(key, value)?,
            "hist_bins" => self.hist_bins = parse(key, value)?,
            "tau_hist" => self.tau_hist = parse(key, value)?,
            "n_trigger" => self.n_trigger = parse(key, value)?,
            "resize_to" => self.resize_to = parse(key, value)?,
            "top_k" => self.top_k = parse(key, value)?,
            "similarity_sense" => self.similarity_sense = value.parse::<SimilaritySense>()?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }
}
