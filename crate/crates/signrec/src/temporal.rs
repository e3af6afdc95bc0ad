//! Held-pose detection: per-frame gray histograms, normalized L1 distance
//! between consecutive frames, and the n-consecutive-similar-pairs trigger.

use crate::error::{Error, Result};
use crate::imaging::GrayFrame;

/// Number of uniform intensity bins over `[0, 1]`.
pub const HIST_BINS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    bins: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn bins(&self) -> &[u64] {
        &self.bins
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    #[cfg(test)]
    pub(crate) fn from_bins(bins: Vec<u64>) -> Self {
        let total = bins.iter().sum();
        Self { bins, total }
    }
}

/// Counts intensities into [`HIST_BINS`] bins; intensity `x` lands in bin
/// `min(floor(x * 64), 63)`.
pub fn histogram(frame: &GrayFrame) -> Histogram {
    let mut bins = vec![0u64; HIST_BINS];
    for &v in frame.data() {
        let bin = ((v * HIST_BINS as f64) as usize).min(HIST_BINS - 1);
        bins[bin] += 1;
    }
    Histogram {
        bins,
        total: frame.data().len() as u64,
    }
}

/// Normalized L1 distance `sum |a_i - b_i| / (2 * total)`, in `[0, 1]`.
/// Zero exactly when the histograms are identical.
pub fn hist_distance(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.bins.len() != b.bins.len() {
        return Err(Error::HistogramMismatch {
            reason: format!("bin counts {} vs {}", a.bins.len(), b.bins.len()),
        });
    }
    if a.total != b.total || a.total == 0 {
        return Err(Error::HistogramMismatch {
            reason: format!("totals {} vs {}", a.total, b.total),
        });
    }
    let l1: u64 = a
        .bins
        .iter()
        .zip(&b.bins)
        .map(|(&x, &y)| x.abs_diff(y))
        .sum();
    Ok(l1 as f64 / (2 * a.total) as f64)
}

/// Which side of the distance threshold counts as "similar".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimilaritySense {
    /// Distance at or below the threshold means similar (identical frames
    /// have distance 0).
    #[default]
    Below,
    /// Inverted reading: distance at or above the threshold means similar.
    Above,
}

impl std::str::FromStr for SimilaritySense {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "below" => Ok(Self::Below),
            "above" => Ok(Self::Above),
            other => Err(format!("similarity sense must be `below` or `above`, got {other:?}")),
        }
    }
}

impl std::fmt::Display for SimilaritySense {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Below => "below",
            Self::Above => "above",
        })
    }
}

/// Counts consecutive similar frame pairs and fires once the count reaches
/// `n`, then re-arms. One instance per stream.
#[derive(Debug, Clone)]
pub struct DetectorState {
    consecutive_similar: u32,
    n: u32,
    tau_hist: f64,
    sense: SimilaritySense,
    last: Option<Histogram>,
}

impl DetectorState {
    pub fn new(n: u32, tau_hist: f64, sense: SimilaritySense) -> Result<Self> {
        if n < 1 {
            return Err(Error::ConfigInvalid {
                reason: "trigger threshold n must be at least 1".into(),
            });
        }
        if tau_hist.is_nan() || tau_hist <= 0.0 {
            return Err(Error::ConfigInvalid {
                reason: format!("tau_hist must be positive, got {tau_hist}"),
            });
        }
        Ok(Self {
            consecutive_similar: 0,
            n,
            tau_hist,
            sense,
            last: None,
        })
    }

    pub fn consecutive_similar(&self) -> u32 {
        self.consecutive_similar
    }

    /// Feeds one frame. Returns `true` exactly when the n-th consecutive
    /// similar pair is observed; the counter then resets so a held pose
    /// fires once every `n` frames.
    pub fn step(&mut self, frame: &GrayFrame) -> Result<bool> {
        let h = histogram(frame);
        let Some(last) = &self.last else {
            self.last = Some(h);
            self.consecutive_similar = 0;
            return Ok(false);
        };
        let d = hist_distance(&h, last)?;
        let similar = match self.sense {
            SimilaritySense::Below => d <= self.tau_hist,
            SimilaritySense::Above => d >= self.tau_hist,
        };
        if similar {
            self.consecutive_similar += 1;
        } else {
            self.consecutive_similar = 0;
        }
        self.last = Some(h);
        if self.consecutive_similar == self.n {
            self.consecutive_similar = 0;
            return Ok(true);
        }
        Ok(false)
    }
}
