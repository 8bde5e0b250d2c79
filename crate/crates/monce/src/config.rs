//! Evaluation parameters.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Kernel bandwidth selection for the sequence-length density estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    /// Rule-of-thumb bandwidth `0.9 * min(sd, iqr / 1.34) * n^(-1/5)`.
    Silverman,
    /// Fixed bandwidth in frames.
    Fixed(f64),
}

/// All knobs of an evaluation run. `EvalConfig::default()` is the
/// documented baseline; config files override individual keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Minimum overlap for a candidate match; pairs must satisfy
    /// `iou > iou_min` (strict).
    pub iou_min: f64,
    /// Absence runs shorter than this many frames count as short-term for
    /// re-identification; the rest are long-term.
    pub reid_threshold: usize,
    /// Density cutoff (relative to the density peak) that bounds the
    /// sequence-length averaging range.
    pub kde_density_fraction: f64,
    /// Bandwidth selection for the length density estimate.
    pub kde_bandwidth_rule: BandwidthRule,
    /// Threshold spacing of the localization curve.
    pub localization_grid_step: f64,
    /// When false, summary scores average over the full observed length
    /// range instead of the density-selected one.
    pub use_kde_range: bool,
    /// Diagnostic switch: pool frames across sequences instead of averaging
    /// per-sequence means. Off by default; every sequence then counts
    /// equally regardless of length.
    pub pooled_averaging: bool,
    /// Overrides the video length inferred from the input files
    /// (`max frame + 1`). Must cover every observed frame.
    pub video_length_override: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            iou_min: 0.0,
            reid_threshold: 30,
            kde_density_fraction: 0.5,
            kde_bandwidth_rule: BandwidthRule::Silverman,
            localization_grid_step: 0.05,
            use_kde_range: true,
            pooled_averaging: false,
            video_length_override: None,
        }
    }
}

impl EvalConfig {
    /// Check every field against its documented range.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.iou_min) {
            return Err(Error::Config(format!(
                "iou_min must be in [0, 1), got {}",
                self.iou_min
            )));
        }
        if self.reid_threshold == 0 {
            return Err(Error::Config(
                "reid_threshold must be at least 1 frame".to_string(),
            ));
        }
        if !(self.kde_density_fraction > 0.0 && self.kde_density_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "kde_density_fraction must be in (0, 1], got {}",
                self.kde_density_fraction
            )));
        }
        if let BandwidthRule::Fixed(h) = self.kde_bandwidth_rule {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::Config(format!(
                    "fixed KDE bandwidth must be positive, got {h}"
                )));
            }
        }
        if !(self.localization_grid_step > 0.0 && self.localization_grid_step <= 1.0) {
            return Err(Error::Config(format!(
                "localization_grid_step must be in (0, 1], got {}",
                self.localization_grid_step
            )));
        }
        if self.video_length_override == Some(0) {
            return Err(Error::Config("video_length must be at least 1".to_string()));
        }
        Ok(())
    }
}
