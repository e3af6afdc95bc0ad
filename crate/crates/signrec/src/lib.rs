//! Recognition of static hand signs in recorded frame sequences.
//!
//! The pipeline has three stages:
//!
//! 1. **Preprocessing** — each frame is converted to HSV, thresholded into a
//!    skin mask, smoothed with binary opening/closing, and reduced to its
//!    largest connected blob ([`imaging`]). A held pose is detected when the
//!    histograms of consecutive filtered frames stay similar for `n` pairs
//!    in a row ([`temporal`]).
//! 2. **Feature extraction** — the triggering frame is resized to a square,
//!    its row covariance is decomposed with a cyclic Jacobi solver, and the
//!    top five eigenvalue/eigenvector pairs become the feature set
//!    ([`features`]).
//! 3. **Classification** — per-eigenvector Euclidean distances, weighted by
//!    eigenvalue differences and summed, score the features against every
//!    enrolled template; the minimum names the sign ([`classifier`]).
//!
//! [`pipeline`] wires the stages over directories of PPM/PGM frames, with
//! template persistence in [`db`] and evaluation reports in [`report`].

pub mod classifier;
pub mod config;
pub mod db;
pub mod error;
pub mod features;
pub mod imaging;
pub mod netpbm;
pub mod pipeline;
pub mod report;
pub mod temporal;

pub use classifier::{classify, RecognitionResult, Template, TemplateDb};
pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use features::{extract_features, FeatureVector};
pub use imaging::{BinaryMask, GrayFrame, HsvFrame, RgbFrame, SkinThresholds};
pub use pipeline::{enroll, evaluate, recognize_image, watch, FrameSequence};
pub use temporal::{DetectorState, SimilaritySense};
