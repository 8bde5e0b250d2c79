//! Metric curves over sequence length, summary scores, and the assembled
//! evaluation report.
//!
//! All length curves share one construction: trim every sequence to its
//! first `T` frames, score the trimmed window per sequence, then average
//! the per-sequence scores. Per-sequence averaging keeps one long busy
//! entity from drowning out many short ones; pooled (per-frame) averaging
//! is available behind [`EvalConfig::pooled_averaging`] for diagnostics.
//! Summary scores then average a curve over a data-driven range of
//! lengths (see [`kde`]).

pub mod kde;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::config::EvalConfig;
use crate::matcher::{classify, Outcome, OutcomeTable, UidCriterion};
use crate::model::{build_sequences, AbsenceRun, GroundTruthSequence, TrackSet, Uid};
use crate::{Error, Result};

pub use kde::{kde_range, KdeRange};

/// One point of a curve indexed by window length `t`.
///
/// `support` counts the sequences of length >= `t` that the point ranges
/// over; `value` is `None` when none of them could be scored (for the
/// precision curve: no predicted boxes anywhere in any window).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthPoint {
    pub t: usize,
    pub value: Option<f64>,
    pub support: usize,
}

/// Curve over window lengths `t = 1..=max`, in ascending order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LengthCurve {
    pub points: Vec<LengthPoint>,
}

impl LengthCurve {
    pub fn value_at(&self, t: usize) -> Option<f64> {
        self.points.iter().find(|p| p.t == t).and_then(|p| p.value)
    }
}

/// One point of the longevity curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongevityPoint {
    pub t: usize,
    /// Sequences of length >= t whose first t frames are clean: every
    /// present frame matched, no attributed box on any absence frame.
    pub successes: usize,
    /// Sequences of length >= t.
    pub total: usize,
    pub rate: f64,
}

/// Longevity curve over `t = 1..=max sequence length`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LongevityCurve {
    pub points: Vec<LongevityPoint>,
}

impl LongevityCurve {
    pub fn point_at(&self, t: usize) -> Option<&LongevityPoint> {
        self.points.iter().find(|p| p.t == t)
    }
}

/// One point of the localization curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationPoint {
    pub threshold: f64,
    /// Fraction of scored overlaps at or above `threshold` (strictly above
    /// zero at `threshold` 0.0); `None` when no track survived its full
    /// sequence, reported rather than silently zeroed.
    pub rate: Option<f64>,
}

/// One point of the absence-prediction curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbsencePoint {
    pub t_a: usize,
    /// Fraction of true negatives among the first `t_a` frames of every
    /// absence run of length >= `t_a`, pooled over runs.
    pub rate: f64,
    pub support: usize,
}

/// Re-identification rates over interior absence runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReidRates {
    /// Runs shorter than this many frames count as short-term.
    pub threshold: usize,
    pub short_count: usize,
    pub short_rate: Option<f64>,
    pub long_count: usize,
    pub long_rate: Option<f64>,
}

fn seq_index(sequences: &[GroundTruthSequence]) -> BTreeMap<&Uid, &GroundTruthSequence> {
    sequences.iter().map(|s| (&s.uid, s)).collect()
}

fn outcomes_of<'a>(table: &'a OutcomeTable, uid: &Uid) -> &'a [Outcome] {
    &table
        .per_sequence
        .get(uid)
        .unwrap_or_else(|| panic!("outcome table has no entry for sequence {uid}"))
        .outcomes
}

/// Tracking recall as a function of window length.
///
/// Per sequence of length >= `t`: the mean over *present* frames in the
/// first `t` of the matched overlap (0 where the frame was missed). The
/// curve value is the mean of the per-sequence means.
pub fn tracking_recall_curve(
    table: &OutcomeTable,
    sequences: &[GroundTruthSequence],
    cfg: &EvalConfig,
) -> LengthCurve {
    struct Pre {
        len: usize,
        value: Vec<f64>,
        present: Vec<usize>,
    }
    let pres: Vec<Pre> = sequences
        .iter()
        .map(|s| {
            let outcomes = outcomes_of(table, &s.uid);
            let mut value = Vec::with_capacity(s.length + 1);
            let mut present = Vec::with_capacity(s.length + 1);
            value.push(0.0);
            present.push(0);
            for o in outcomes {
                let (dv, dp) = match *o {
                    Outcome::TruePositive(iou) => (iou, 1),
                    Outcome::FalseNegative => (0.0, 1),
                    _ => (0.0, 0),
                };
                value.push(value.last().unwrap() + dv);
                present.push(present.last().unwrap() + dp);
            }
            Pre {
                len: s.length,
                value,
                present,
            }
        })
        .collect();

    let max_len = sequences.iter().map(|s| s.length).max().unwrap_or(0);
    let mut points = Vec::with_capacity(max_len);
    for t in 1..=max_len {
        let mut support = 0;
        let mut mean_sum = 0.0;
        let mut contributors = 0usize;
        let mut pooled_sum = 0.0;
        let mut pooled_cnt = 0usize;
        for p in &pres {
            if p.len < t {
                continue;
            }
            support += 1;
            let cnt = p.present[t];
            if cnt > 0 {
                contributors += 1;
                mean_sum += p.value[t] / cnt as f64;
                pooled_sum += p.value[t];
                pooled_cnt += cnt;
            }
        }
        let value = if cfg.pooled_averaging {
            (pooled_cnt > 0).then(|| pooled_sum / pooled_cnt as f64)
        } else {
            (contributors > 0).then(|| mean_sum / contributors as f64)
        };
        points.push(LengthPoint { t, value, support });
    }
    LengthCurve { points }
}

/// Tracking precision as a function of window length.
///
/// Predicted tracks are pooled onto the entity their UID is associated
/// with; per such entity of length >= `t` the score is the mean over its
/// attributed predicted boxes in the first `t` frames of the matched
/// overlap (0 for boxes that matched nothing). Predicted UIDs that never
/// associated form pseudo-sequences — first predicted frame to video end,
/// scoring 0 — so invented tracks pull precision down without touching
/// recall. Entities with no attributed box in the window are skipped for
/// that `t`.
pub fn tracking_precision_curve(
    table: &OutcomeTable,
    sequences: &[GroundTruthSequence],
    cfg: &EvalConfig,
) -> LengthCurve {
    let by_uid = seq_index(sequences);
    struct Pre {
        len: usize,
        cnt: Vec<usize>,
        sum: Vec<f64>,
    }
    let mut assigned = Vec::new();
    for (gt_uid, events) in &table.attributed_pred_frames {
        let seq = by_uid
            .get(gt_uid)
            .unwrap_or_else(|| panic!("attributed frames for unknown sequence {gt_uid}"));
        let mut cnt = vec![0usize; seq.length + 1];
        let mut sum = vec![0.0f64; seq.length + 1];
        for &(frame, v) in events {
            let off = frame - seq.first_frame;
            cnt[off + 1] += 1;
            sum[off + 1] += v;
        }
        for i in 1..=seq.length {
            cnt[i] += cnt[i - 1];
            sum[i] += sum[i - 1];
        }
        assigned.push(Pre {
            len: seq.length,
            cnt,
            sum,
        });
    }

    let video_length = table.video_length;
    // Orphan pseudo-sequence lengths, as a suffix count over t.
    let mut orphans_ge = vec![0usize; video_length + 2];
    for &first in table.orphan_uids.values() {
        orphans_ge[video_length - first] += 1;
    }
    for t in (0..=video_length).rev() {
        orphans_ge[t] += orphans_ge[t + 1];
    }
    // Orphan boxes countable at each t (pooled mode): a box at window
    // offset `o` in a pseudo-sequence of length `l` is inside the window
    // for t in (o, l]. Difference array over t, then prefix.
    let mut orphan_boxes_at = vec![0isize; video_length + 2];
    for (frame, uid) in &table.orphan_predictions {
        let first = table.orphan_uids[uid];
        let off = frame - first;
        let len = video_length - first;
        orphan_boxes_at[off + 1] += 1;
        orphan_boxes_at[len + 1] -= 1;
    }
    for t in 1..orphan_boxes_at.len() {
        orphan_boxes_at[t] += orphan_boxes_at[t - 1];
    }

    let max_assigned = assigned.iter().map(|p| p.len).max().unwrap_or(0);
    let max_orphan = table
        .orphan_uids
        .values()
        .map(|&first| video_length - first)
        .max()
        .unwrap_or(0);
    let max_len = max_assigned.max(max_orphan);

    let mut points = Vec::with_capacity(max_len);
    for t in 1..=max_len {
        let orphans = orphans_ge[t.min(video_length + 1)];
        let mut support = orphans;
        let mut mean_sum = 0.0;
        let mut contributors = 0usize;
        let mut pooled_sum = 0.0;
        let mut pooled_cnt = 0usize;
        for p in &assigned {
            if p.len < t {
                continue;
            }
            support += 1;
            if p.cnt[t] > 0 {
                contributors += 1;
                mean_sum += p.sum[t] / p.cnt[t] as f64;
                pooled_sum += p.sum[t];
                pooled_cnt += p.cnt[t];
            }
        }
        let value = if cfg.pooled_averaging {
            let cnt = pooled_cnt + orphan_boxes_at[t] as usize;
            (cnt > 0).then(|| pooled_sum / cnt as f64)
        } else {
            let denom = contributors + orphans;
            (denom > 0).then(|| mean_sum / denom as f64)
        };
        points.push(LengthPoint { t, value, support });
    }
    LengthCurve { points }
}

/// Longevity curve: for each window length `t`, how many sequences of
/// length >= `t` got through their first `t` frames with no miss and no
/// attributed false positive.
pub fn longevity_curve(table: &OutcomeTable, sequences: &[GroundTruthSequence]) -> LongevityCurve {
    let max_len = sequences.iter().map(|s| s.length).max().unwrap_or(0);
    // total_ge[t] / clean_ge[t]: sequences with length (resp. clean prefix)
    // of at least t.
    let mut total_ge = vec![0usize; max_len + 2];
    let mut clean_ge = vec![0usize; max_len + 2];
    for s in sequences {
        let outcomes = outcomes_of(table, &s.uid);
        let first_bad = outcomes.iter().position(|o| o.is_failure());
        total_ge[s.length] += 1;
        clean_ge[first_bad.unwrap_or(s.length).min(s.length)] += 1;
    }
    for t in (0..=max_len).rev() {
        total_ge[t] += total_ge[t + 1];
        clean_ge[t] += clean_ge[t + 1];
    }
    let points = (1..=max_len)
        .map(|t| {
            let total = total_ge[t];
            let successes = clean_ge[t];
            LongevityPoint {
                t,
                successes,
                total,
                rate: successes as f64 / total as f64,
            }
        })
        .collect();
    LongevityCurve { points }
}

/// Largest `t` such that the longevity rate holds at or above `p` on every
/// window length up to `t`; 0 if it fails already at `t = 1`.
pub fn longevity_statistic(curve: &LongevityCurve, p: f64) -> usize {
    let mut last_ok = 0;
    for point in &curve.points {
        if point.rate >= p {
            last_ok = point.t;
        } else {
            break;
        }
    }
    last_ok
}

/// Localization curve: the overlap distribution of true positives from
/// sequences that stayed clean over their whole length, evaluated on a
/// fixed threshold grid `{0, step, 2*step, ..., 1}`.
pub fn localization_curve(
    table: &OutcomeTable,
    sequences: &[GroundTruthSequence],
    cfg: &EvalConfig,
) -> Vec<LocalizationPoint> {
    let mut overlaps: Vec<f64> = Vec::new();
    for s in sequences {
        let outcomes = outcomes_of(table, &s.uid);
        if outcomes.iter().any(|o| o.is_failure()) {
            continue;
        }
        overlaps.extend(outcomes.iter().filter_map(|o| match *o {
            Outcome::TruePositive(iou) => Some(iou),
            _ => None,
        }));
    }
    overlaps.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut thresholds = Vec::new();
    let mut i = 0u32;
    loop {
        let th = i as f64 * cfg.localization_grid_step;
        if th >= 1.0 - 1e-12 {
            break;
        }
        thresholds.push(th);
        i += 1;
    }
    thresholds.push(1.0);

    thresholds
        .into_iter()
        .map(|threshold| {
            let rate = (!overlaps.is_empty()).then(|| {
                let hit = if threshold == 0.0 {
                    overlaps.iter().filter(|&&v| v > 0.0).count()
                } else {
                    overlaps.iter().filter(|&&v| v >= threshold).count()
                };
                hit as f64 / overlaps.len() as f64
            });
            LocalizationPoint { threshold, rate }
        })
        .collect()
}

/// Absence runs of every sequence, tagged with their entity.
pub fn all_absence_runs(sequences: &[GroundTruthSequence]) -> Vec<(Uid, AbsenceRun)> {
    sequences
        .iter()
        .flat_map(|s| s.absence_runs().into_iter().map(|r| (s.uid.clone(), r)))
        .collect()
}

/// Absence-prediction curve: for each lead `t_a`, the fraction of true
/// negatives among the first `t_a` frames of every absence run of length
/// >= `t_a`, pooled over runs (terminal runs included).
pub fn absence_prediction_curve(
    table: &OutcomeTable,
    runs: &[(Uid, AbsenceRun)],
) -> Vec<AbsencePoint> {
    struct Pre {
        len: usize,
        tn: Vec<usize>,
    }
    let pres: Vec<Pre> = runs
        .iter()
        .map(|(uid, run)| {
            let seq = &table.per_sequence[uid];
            let start = run.start_frame - seq.first_frame;
            let mut tn = Vec::with_capacity(run.length + 1);
            tn.push(0);
            for k in 0..run.length {
                let is_tn = matches!(seq.outcomes[start + k], Outcome::TrueNegative);
                tn.push(tn.last().unwrap() + usize::from(is_tn));
            }
            Pre {
                len: run.length,
                tn,
            }
        })
        .collect();

    let max_run = pres.iter().map(|p| p.len).max().unwrap_or(0);
    (1..=max_run)
        .map(|t_a| {
            let mut tn_frames = 0usize;
            let mut frames = 0usize;
            let mut support = 0usize;
            for p in &pres {
                if p.len < t_a {
                    continue;
                }
                support += 1;
                tn_frames += p.tn[t_a];
                frames += t_a;
            }
            AbsencePoint {
                t_a,
                rate: tn_frames as f64 / frames as f64,
                support,
            }
        })
        .collect()
}

/// Short- and long-term re-identification rates.
///
/// Only interior absence runs are scored: a run that reaches the video
/// end has no reappearance frame. A run scores 1 exactly when the frame
/// the entity reappears on is a true positive.
pub fn reid_rates(table: &OutcomeTable, runs: &[(Uid, AbsenceRun)], cfg: &EvalConfig) -> ReidRates {
    let mut short = (0usize, 0usize); // (scored 1, count)
    let mut long = (0usize, 0usize);
    for (uid, run) in runs {
        if run.ends_at_video_end {
            continue;
        }
        let seq = &table.per_sequence[uid];
        let reappear = run.start_frame + run.length - seq.first_frame;
        let hit = matches!(seq.outcomes[reappear], Outcome::TruePositive(_));
        let bucket = if run.length < cfg.reid_threshold {
            &mut short
        } else {
            &mut long
        };
        bucket.1 += 1;
        bucket.0 += usize::from(hit);
    }
    let rate = |(hits, count): (usize, usize)| (count > 0).then(|| hits as f64 / count as f64);
    ReidRates {
        threshold: cfg.reid_threshold,
        short_count: short.1,
        short_rate: rate(short),
        long_count: long.1,
        long_rate: rate(long),
    }
}

/// Mean of curve values over `t` in `[t_lo, t_hi]`, skipping points with
/// no support. Errors when the range contains no usable point.
pub fn expected_average(curve: &LengthCurve, t_lo: usize, t_hi: usize) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for p in &curve.points {
        if p.t < t_lo || p.t > t_hi || p.support == 0 {
            continue;
        }
        if let Some(v) = p.value {
            sum += v;
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::Metric(format!(
            "averaging range [{t_lo}, {t_hi}] contains no scored curve points"
        )));
    }
    Ok(sum / n as f64)
}

/// Length range the summary scores average over, with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragingRange {
    pub t_lo: usize,
    pub t_hi: usize,
    /// `"kde_mode_anchored"` when density-selected, `"full_observed"` when
    /// spanning all observed lengths.
    pub source: String,
    pub bandwidth: Option<f64>,
    pub peak_length: Option<usize>,
}

/// Curves and summary scores for one UID criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub eao: f64,
    pub eao_p: f64,
    pub recall_curve: LengthCurve,
    pub precision_curve: LengthCurve,
    pub longevity_curve: LongevityCurve,
}

/// Complete evaluation result. Serializes with a fixed key order and
/// explicit nulls so identical inputs produce identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub schema_version: u32,
    /// Expected average overlap: recall curve averaged over the range.
    pub eao: f64,
    /// Precision counterpart of `eao`.
    pub eao_p: f64,
    /// Longevity statistic per rate requirement (keys "0.50", "0.75",
    /// "0.90"): the longest window length the rate sustains.
    pub longevity_stats: BTreeMap<String, usize>,
    pub reid: ReidRates,
    /// Criterion the summary fields above are computed under.
    pub summary_criterion: String,
    pub averaging_range: AveragingRange,
    pub video_length: usize,
    pub sequence_count: usize,
    /// Per-criterion curves, keyed "any_uid" / "original_uid".
    pub criteria: BTreeMap<String, CriterionReport>,
    pub localization_curve: Vec<LocalizationPoint>,
    pub absence_curve: Vec<AbsencePoint>,
    pub config: EvalConfig,
}

/// Rate requirements the longevity statistics are reported at.
pub const LONGEVITY_RATE_LEVELS: [f64; 3] = [0.5, 0.75, 0.9];

/// Report schema version written by this crate.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Evaluate `pred` against `gt` under both UID criteria and assemble the
/// full report. Summary scores come from the any-UID pass; the averaging
/// range is shared by all criteria and both curve families.
pub fn assemble_report(gt: &TrackSet, pred: &TrackSet, cfg: &EvalConfig) -> Result<MetricReport> {
    assemble_report_for(
        gt,
        pred,
        cfg,
        &[UidCriterion::AnyUid, UidCriterion::OriginalUid],
    )
}

/// [`assemble_report`] restricted to a chosen set of criteria. Summary
/// fields use the any-UID pass when it is included, otherwise the first
/// listed criterion.
pub fn assemble_report_for(
    gt: &TrackSet,
    pred: &TrackSet,
    cfg: &EvalConfig,
    criteria: &[UidCriterion],
) -> Result<MetricReport> {
    cfg.validate()?;
    if criteria.is_empty() {
        return Err(Error::InvalidInput(
            "at least one UID criterion is required".to_string(),
        ));
    }
    let sequences = build_sequences(gt)?;
    let runs = all_absence_runs(&sequences);
    let lengths: Vec<usize> = sequences.iter().map(|s| s.length).collect();

    let averaging_range = if cfg.use_kde_range {
        let kr = kde_range(&lengths, cfg)?;
        AveragingRange {
            t_lo: kr.t_lo,
            t_hi: kr.t_hi,
            source: "kde_mode_anchored".to_string(),
            bandwidth: Some(kr.bandwidth),
            peak_length: Some(kr.peak_length),
        }
    } else {
        AveragingRange {
            t_lo: *lengths.iter().min().unwrap(),
            t_hi: *lengths.iter().max().unwrap(),
            source: "full_observed".to_string(),
            bandwidth: None,
            peak_length: None,
        }
    };

    let primary = if criteria.contains(&UidCriterion::AnyUid) {
        UidCriterion::AnyUid
    } else {
        criteria[0]
    };

    let mut tables: BTreeMap<&'static str, (UidCriterion, OutcomeTable)> = BTreeMap::new();
    for &criterion in criteria {
        if tables.contains_key(criterion.key()) {
            continue;
        }
        let table = classify(gt, pred, criterion, cfg)?;
        tables.insert(criterion.key(), (criterion, table));
    }

    let mut criteria_reports = BTreeMap::new();
    for (key, (_, table)) in &tables {
        let recall = tracking_recall_curve(table, &sequences, cfg);
        let precision = tracking_precision_curve(table, &sequences, cfg);
        let longevity = longevity_curve(table, &sequences);
        let eao = expected_average(&recall, averaging_range.t_lo, averaging_range.t_hi)?;
        let eao_p = expected_average(&precision, averaging_range.t_lo, averaging_range.t_hi)?;
        criteria_reports.insert(
            key.to_string(),
            CriterionReport {
                eao,
                eao_p,
                recall_curve: recall,
                precision_curve: precision,
                longevity_curve: longevity,
            },
        );
    }

    let primary_table = &tables[primary.key()].1;
    let primary_report = &criteria_reports[primary.key()];
    let longevity_stats = LONGEVITY_RATE_LEVELS
        .iter()
        .map(|&p| {
            (
                format!("{p:.2}"),
                longevity_statistic(&primary_report.longevity_curve, p),
            )
        })
        .collect();

    Ok(MetricReport {
        schema_version: REPORT_SCHEMA_VERSION,
        eao: primary_report.eao,
        eao_p: primary_report.eao_p,
        longevity_stats,
        reid: reid_rates(primary_table, &runs, cfg),
        summary_criterion: primary.key().to_string(),
        averaging_range,
        video_length: gt.video_length(),
        sequence_count: sequences.len(),
        criteria: criteria_reports,
        localization_curve: localization_curve(primary_table, &sequences, cfg),
        absence_curve: absence_prediction_curve(primary_table, &runs),
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundingBox;
    use crate::model::EntityFrame;

    fn ef(frame: usize, uid: &str, x: f64) -> EntityFrame {
        EntityFrame::new(
            frame,
            Uid::from(uid),
            BoundingBox::new(x, 0.0, 10.0, 10.0).unwrap(),
            None,
        )
        .unwrap()
    }

    fn ts(entries: Vec<EntityFrame>, len: usize) -> TrackSet {
        TrackSet::new(entries, len).unwrap()
    }

    fn eval(
        gt: &TrackSet,
        pred: &TrackSet,
        criterion: UidCriterion,
    ) -> (OutcomeTable, Vec<GroundTruthSequence>) {
        let cfg = EvalConfig::default();
        let table = classify(gt, pred, criterion, &cfg).unwrap();
        let sequences = build_sequences(gt).unwrap();
        (table, sequences)
    }

    #[test]
    fn recall_counts_one_miss_in_ten() {
        // Present on all 10 frames, the tracker misses frame 5.
        let gt = ts((0..10).map(|f| ef(f, "g", 0.0)).collect(), 10);
        let pred = ts(
            (0..10)
                .filter(|&f| f != 5)
                .map(|f| ef(f, "p", 0.0))
                .collect(),
            10,
        );
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);
        let curve = tracking_recall_curve(&table, &seqs, &EvalConfig::default());
        assert_eq!(curve.value_at(10), Some(0.9));
        assert_eq!(curve.value_at(5), Some(1.0));
        assert_eq!(curve.points.len(), 10);
        assert!(curve.points.iter().all(|p| p.support == 1));
    }

    #[test]
    fn precision_counts_unmatched_boxes() {
        // 8 perfect frames plus 2 boxes far from the (present) entity:
        // recall and precision both come out 8/10 at full length.
        let mut pred_entries: Vec<_> = (0..8).map(|f| ef(f, "p", 0.0)).collect();
        pred_entries.push(ef(8, "p", 500.0));
        pred_entries.push(ef(9, "p", 500.0));
        let gt = ts((0..10).map(|f| ef(f, "g", 0.0)).collect(), 10);
        let pred = ts(pred_entries, 10);
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);
        let cfg = EvalConfig::default();
        assert_eq!(
            tracking_precision_curve(&table, &seqs, &cfg).value_at(10),
            Some(0.8)
        );
        assert_eq!(
            tracking_recall_curve(&table, &seqs, &cfg).value_at(10),
            Some(0.8)
        );
    }

    #[test]
    fn orphan_tracks_halve_precision_but_not_recall() {
        // One perfect entity plus one invented track of the same length.
        let gt = ts((0..10).map(|f| ef(f, "g", 0.0)).collect(), 10);
        let mut entries: Vec<_> = (0..10).map(|f| ef(f, "p", 0.0)).collect();
        entries.extend((0..10).map(|f| ef(f, "fake", 500.0)));
        let pred = ts(entries, 10);
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);
        let cfg = EvalConfig::default();
        let precision = tracking_precision_curve(&table, &seqs, &cfg);
        let recall = tracking_recall_curve(&table, &seqs, &cfg);
        for t in 1..=10 {
            assert_eq!(precision.value_at(t), Some(0.5));
            assert_eq!(recall.value_at(t), Some(1.0));
            assert_eq!(precision.points[t - 1].support, 2);
        }
    }

    #[test]
    fn longevity_breaks_at_first_failure() {
        // Miss at offset 5 of a 10-frame sequence: clean windows up to 5.
        let gt = ts((0..10).map(|f| ef(f, "g", 0.0)).collect(), 10);
        let pred = ts(
            (0..10)
                .filter(|&f| f != 5)
                .map(|f| ef(f, "p", 0.0))
                .collect(),
            10,
        );
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);
        let curve = longevity_curve(&table, &seqs);
        for p in &curve.points {
            let expected = if p.t <= 5 { 1.0 } else { 0.0 };
            assert_eq!(p.rate, expected, "t={}", p.t);
            assert_eq!(p.total, 1);
        }
    }

    #[test]
    fn longevity_statistic_first_crossing() {
        let mk = |rates: &[(usize, f64)]| LongevityCurve {
            points: rates
                .iter()
                .map(|&(t, rate)| LongevityPoint {
                    t,
                    successes: 0,
                    total: 1,
                    rate,
                })
                .collect(),
        };
        // Dips below 0.9 at t=21, recovers later: the statistic must not
        // look past the first crossing.
        let mut rates: Vec<(usize, f64)> = (1..=20).map(|t| (t, 1.0)).collect();
        rates.extend((21..=72).map(|t| (t, 0.75)));
        rates.extend((73..=100).map(|t| (t, 1.0)));
        let curve = mk(&rates);
        assert_eq!(longevity_statistic(&curve, 0.9), 20);
        assert_eq!(longevity_statistic(&curve, 0.75), 100);
        assert_eq!(longevity_statistic(&curve, 0.5), 100);
        // Fails immediately.
        let bad = mk(&[(1, 0.4), (2, 1.0)]);
        assert_eq!(longevity_statistic(&bad, 0.5), 0);
    }

    #[test]
    fn localization_distribution_on_grid() {
        // Three single-frame entities tracked with overlaps ~0.3, 0.6, ~0.9.
        let gt = ts(
            vec![ef(0, "a", 0.0), ef(0, "b", 100.0), ef(0, "c", 200.0)],
            1,
        );
        let pred = ts(
            vec![
                ef(0, "pa", 70.0 / 13.0),
                ef(0, "pb", 102.5),
                ef(0, "pc", 200.0 + 10.0 / 19.0),
            ],
            1,
        );
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);
        let curve = localization_curve(&table, &seqs, &EvalConfig::default());
        assert_eq!(curve.len(), 21);
        assert_eq!(curve[0].threshold, 0.0);
        assert_eq!(
            *curve.last().unwrap(),
            LocalizationPoint {
                threshold: 1.0,
                rate: Some(0.0)
            }
        );
        assert_eq!(curve[0].rate, Some(1.0));
        let at_half = curve
            .iter()
            .find(|p| (p.threshold - 0.5).abs() < 1e-9)
            .unwrap();
        assert_eq!(at_half.rate, Some(2.0 / 3.0));
    }

    #[test]
    fn localization_is_null_when_no_track_survives() {
        // The only entity is missed on one frame, so no sequence is clean.
        let gt = ts(vec![ef(0, "g", 0.0), ef(1, "g", 0.0)], 2);
        let pred = ts(vec![ef(0, "p", 0.0)], 2);
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);
        let curve = localization_curve(&table, &seqs, &EvalConfig::default());
        assert!(curve.iter().all(|p| p.rate.is_none()));
    }

    #[test]
    fn absence_curve_with_stale_boxes() {
        // Present 0..=4, absent 5..=14, present 15..=19; the tracker holds
        // the box for the first 5 absence frames.
        let present: Vec<usize> = (0..5).chain(15..20).collect();
        let gt = ts(present.iter().map(|&f| ef(f, "g", 0.0)).collect(), 20);
        let pred_frames: Vec<usize> = (0..10).chain(15..20).collect();
        let pred = ts(pred_frames.iter().map(|&f| ef(f, "p", 0.0)).collect(), 20);
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);
        let runs = all_absence_runs(&seqs);
        assert_eq!(runs.len(), 1);
        let curve = absence_prediction_curve(&table, &runs);
        assert_eq!(
            curve[0],
            AbsencePoint {
                t_a: 1,
                rate: 0.0,
                support: 1
            }
        );
        assert_eq!(
            curve[9],
            AbsencePoint {
                t_a: 10,
                rate: 0.5,
                support: 1
            }
        );
        assert_eq!(curve.len(), 10);

        // The entity reappears on a matched frame: short-term run scores 1.
        let reid = reid_rates(&table, &runs, &EvalConfig::default());
        assert_eq!(reid.short_count, 1);
        assert_eq!(reid.short_rate, Some(1.0));
        assert_eq!(reid.long_count, 0);
        assert_eq!(reid.long_rate, None);
    }

    #[test]
    fn terminal_absence_is_not_scored_for_reid() {
        // Entity leaves at frame 5 and never returns.
        let gt = ts((0..5).map(|f| ef(f, "g", 0.0)).collect(), 10);
        let pred = ts((0..5).map(|f| ef(f, "p", 0.0)).collect(), 10);
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);
        let runs = all_absence_runs(&seqs);
        assert_eq!(runs.len(), 1);
        assert!(runs[0].1.ends_at_video_end);
        let reid = reid_rates(&table, &runs, &EvalConfig::default());
        assert_eq!((reid.short_count, reid.long_count), (0, 0));
        assert_eq!(reid.short_rate, None);
    }

    #[test]
    fn expected_average_over_subranges() {
        let gt = ts((0..10).map(|f| ef(f, "g", 0.0)).collect(), 10);
        let pred = ts(
            (0..10)
                .filter(|&f| f != 5)
                .map(|f| ef(f, "p", 0.0))
                .collect(),
            10,
        );
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);
        let curve = tracking_recall_curve(&table, &seqs, &EvalConfig::default());
        // Constant 1.0 over [1, 5].
        assert_eq!(expected_average(&curve, 1, 5).unwrap(), 1.0);
        // Out-of-domain range has no points.
        assert!(expected_average(&curve, 11, 20).is_err());
    }

    #[test]
    fn report_for_a_perfect_tracker() {
        let mut gt_entries = Vec::new();
        let mut pred_entries = Vec::new();
        for f in 0..10 {
            gt_entries.push(ef(f, "g1", 0.0));
            pred_entries.push(ef(f, "t1", 0.0));
            if !(4..=6).contains(&f) {
                gt_entries.push(ef(f, "g2", 100.0));
                pred_entries.push(ef(f, "t2", 100.0));
            }
        }
        let gt = ts(gt_entries, 10);
        let pred = ts(pred_entries, 10);
        let report = assemble_report(&gt, &pred, &EvalConfig::default()).unwrap();
        assert_eq!(report.eao, 1.0);
        assert_eq!(report.eao_p, 1.0);
        assert_eq!(report.summary_criterion, "any_uid");
        assert_eq!(report.sequence_count, 2);
        assert_eq!(report.longevity_stats["0.90"], 10);
        assert_eq!(report.reid.short_rate, Some(1.0));
        assert_eq!(report.criteria.len(), 2);
        let orig = &report.criteria["original_uid"];
        assert_eq!(orig.eao, 1.0);
        // Perfect tracking: every localization rate is 1.0.
        assert!(report
            .localization_curve
            .iter()
            .all(|p| p.rate == Some(1.0)));
        // No absence frame has a box: rate 1.0 throughout.
        assert!(report.absence_curve.iter().all(|p| p.rate == 1.0));
    }

    #[test]
    fn report_respects_criterion_selection() {
        let gt = ts((0..5).map(|f| ef(f, "g", 0.0)).collect(), 5);
        let pred = ts((0..5).map(|f| ef(f, "p", 0.0)).collect(), 5);
        let report = assemble_report_for(
            &gt,
            &pred,
            &EvalConfig::default(),
            &[UidCriterion::OriginalUid],
        )
        .unwrap();
        assert_eq!(report.summary_criterion, "original_uid");
        assert_eq!(report.criteria.len(), 1);
        assert!(report.criteria.contains_key("original_uid"));
    }

    #[test]
    fn pooled_averaging_weighs_frames_not_sequences() {
        // Sequence a is present on frames {0, 2} and never tracked;
        // sequence b is present on {0, 1, 2} and always tracked. In the
        // 3-frame window the per-sequence mean is (0 + 1) / 2, while
        // pooling the 5 present frames gives 3/5.
        let mut gt_entries = vec![ef(0, "a", 0.0), ef(2, "a", 0.0)];
        gt_entries.extend((0..3).map(|f| ef(f, "b", 100.0)));
        let pred_entries: Vec<_> = (0..3).map(|f| ef(f, "pb", 100.0)).collect();
        let gt = ts(gt_entries, 3);
        let pred = ts(pred_entries, 3);
        let (table, seqs) = eval(&gt, &pred, UidCriterion::AnyUid);

        let mut cfg = EvalConfig::default();
        let per_seq = tracking_recall_curve(&table, &seqs, &cfg);
        assert_eq!(per_seq.value_at(3), Some(0.5));
        cfg.pooled_averaging = true;
        let pooled = tracking_recall_curve(&table, &seqs, &cfg);
        assert_eq!(pooled.value_at(3), Some(0.6));
        // Window of 2: a contributes one present frame (missed), b two.
        assert_eq!(per_seq.value_at(2), Some(0.5));
        assert_eq!(pooled.value_at(2), Some(2.0 / 3.0));
    }
}
