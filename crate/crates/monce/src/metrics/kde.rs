//! Sequence-length density estimation.
//!
//! Summary scores average a curve over a range of sequence lengths chosen
//! from the data: a Gaussian kernel density estimate over the observed
//! lengths, then the maximal contiguous integer interval around the
//! density mode where the density stays at or above a configured fraction
//! of the peak. This keeps the average anchored to typical sequence
//! lengths instead of being dragged around by a few very short or very
//! long outliers.

use crate::config::{BandwidthRule, EvalConfig};
use crate::{Error, Result};

/// Length range selected for averaging, with the estimate's parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeRange {
    pub t_lo: usize,
    pub t_hi: usize,
    pub bandwidth: f64,
    /// Integer length at the density mode.
    pub peak_length: usize,
}

/// Sample standard deviation (n-1 denominator); 0.0 for fewer than two
/// samples.
fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Linearly interpolated quantile over a sorted slice, `q` in [0, 1].
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Rule-of-thumb bandwidth `0.9 * min(sd, iqr / 1.34) * n^(-1/5)`.
///
/// When the spread estimate collapses to zero (all values equal, or more
/// than half the sample on a single value) the bandwidth degenerates to a
/// tiny floor: the density then concentrates on the data points themselves,
/// which is exactly the right behaviour for picking a range out of such a
/// sample.
fn silverman_bandwidth(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = std_dev(xs).min(iqr / 1.34);
    let h = 0.9 * spread * (xs.len() as f64).powf(-0.2);
    if h > 0.0 {
        h
    } else {
        1e-9
    }
}

/// Gaussian KDE evaluated at `t`.
fn density(t: f64, xs: &[f64], h: f64) -> f64 {
    let norm = 1.0 / ((xs.len() as f64) * h * (2.0 * std::f64::consts::PI).sqrt());
    xs.iter()
        .map(|&x| {
            let z = (t - x) / h;
            (-0.5 * z * z).exp()
        })
        .sum::<f64>()
        * norm
}

/// Select the averaging range for the given sequence lengths.
///
/// The range is the maximal contiguous integer interval containing the
/// density mode on which the density is at least
/// `cfg.kde_density_fraction` of the peak, clamped to the observed
/// `[min, max]`.
pub fn kde_range(lengths: &[usize], cfg: &EvalConfig) -> Result<KdeRange> {
    if lengths.is_empty() {
        return Err(Error::Metric(
            "cannot select a length range from zero sequences".to_string(),
        ));
    }
    let xs: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let lo = *lengths.iter().min().unwrap();
    let hi = *lengths.iter().max().unwrap();
    let h = match cfg.kde_bandwidth_rule {
        BandwidthRule::Silverman => silverman_bandwidth(&xs),
        BandwidthRule::Fixed(h) => h,
    };

    let densities: Vec<f64> = (lo..=hi).map(|t| density(t as f64, &xs, h)).collect();
    // On exact density ties the smallest length anchors the range.
    let (peak_idx, peak) =
        densities
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &d)| {
                if d > best.1 {
                    (i, d)
                } else {
                    best
                }
            });
    let cutoff = cfg.kde_density_fraction * peak;

    let mut lo_idx = peak_idx;
    while lo_idx > 0 && densities[lo_idx - 1] >= cutoff {
        lo_idx -= 1;
    }
    let mut hi_idx = peak_idx;
    while hi_idx + 1 < densities.len() && densities[hi_idx + 1] >= cutoff {
        hi_idx += 1;
    }

    Ok(KdeRange {
        t_lo: lo + lo_idx,
        t_hi: lo + hi_idx,
        bandwidth: h,
        peak_length: lo + peak_idx,
    })
}
