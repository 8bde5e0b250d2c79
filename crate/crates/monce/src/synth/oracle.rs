//! Brute-force reference implementations.
//!
//! Everything here is written for obviousness, not speed, and is kept
//! deliberately independent of the production matcher and curve code: the
//! per-frame matching enumerates every assignment, the association
//! bookkeeping is its own little ledger, and every curve value is
//! recomputed from scratch for every window length. Test suites run both
//! routes on the same inputs and require agreement.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::EvalConfig;
use crate::matcher::UidCriterion;
use crate::model::{EntityFrame, TrackSet, Uid};
use crate::{Error, Result};

/// Largest per-side box count [`exhaustive_match`] accepts.
pub const MAX_SIDE: usize = 6;
/// Longest video [`reference_curves`] accepts.
pub const MAX_VIDEO: usize = 200;
/// Most ground-truth entities [`reference_curves`] accepts.
pub const MAX_ENTITIES: usize = 10;

/// Write-once record of which entity owns which predicted UID, and which
/// predicted UID each entity saw first.
#[derive(Debug, Clone, Default)]
pub struct LabelLedger {
    pred_owner: BTreeMap<Uid, Uid>,
    gt_first: BTreeMap<Uid, Uid>,
}

impl LabelLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build a ledger from (entity, predicted uid) pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a Uid, &'a Uid)>) -> Self {
        let mut ledger = Self::new();
        for (gt, pred) in pairs {
            ledger.record(gt, pred);
        }
        ledger
    }

    pub fn record(&mut self, gt: &Uid, pred: &Uid) {
        self.pred_owner
            .entry(pred.clone())
            .or_insert_with(|| gt.clone());
        self.gt_first
            .entry(gt.clone())
            .or_insert_with(|| pred.clone());
    }

    pub fn owner(&self, pred: &Uid) -> Option<&Uid> {
        self.pred_owner.get(pred)
    }

    pub fn first(&self, gt: &Uid) -> Option<&Uid> {
        self.gt_first.get(gt)
    }

    fn is_candidate(&self, gt: &Uid, pred: &Uid, criterion: UidCriterion) -> bool {
        if let Some(owner) = self.owner(pred) {
            if owner != gt {
                return false;
            }
        }
        match criterion {
            UidCriterion::AnyUid => true,
            UidCriterion::OriginalUid => match self.first(gt) {
                Some(first) => first == pred,
                None => self.owner(pred).is_none(),
            },
        }
    }
}

/// Result of an exhaustive per-frame matching.
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveMatch {
    /// (entity uid, predicted uid, overlap), ascending by entity uid.
    pub pairs: Vec<(Uid, Uid, f64)>,
    pub total_overlap: f64,
}

impl ExhaustiveMatch {
    pub fn cardinality(&self) -> usize {
        self.pairs.len()
    }
}

/// Try every assignment of predicted boxes to entity boxes and keep the
/// best one: most pairs, then highest total overlap, then the
/// lexicographically smallest pair list. A pair is allowed when the UID
/// criterion admits it and the overlap strictly exceeds `iou_min`.
pub fn exhaustive_match(
    gts: &[&EntityFrame],
    preds: &[&EntityFrame],
    ledger: &LabelLedger,
    criterion: UidCriterion,
    iou_min: f64,
) -> Result<ExhaustiveMatch> {
    if gts.len() > MAX_SIDE || preds.len() > MAX_SIDE {
        return Err(Error::InvalidInput(format!(
            "exhaustive matching handles at most {MAX_SIDE} boxes per side, got {} vs {}",
            gts.len(),
            preds.len()
        )));
    }
    let mut gts: Vec<&EntityFrame> = gts.to_vec();
    gts.sort_by(|a, b| a.uid.cmp(&b.uid));
    let mut preds: Vec<&EntityFrame> = preds.to_vec();
    preds.sort_by(|a, b| a.uid.cmp(&b.uid));

    let allowed: Vec<Vec<Option<f64>>> = gts
        .iter()
        .map(|g| {
            preds
                .iter()
                .map(|p| {
                    let iou = g.bbox.iou(&p.bbox);
                    (ledger.is_candidate(&g.uid, &p.uid, criterion) && iou > iou_min).then_some(iou)
                })
                .collect()
        })
        .collect();

    fn search(
        i: usize,
        allowed: &[Vec<Option<f64>>],
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        best: &mut (usize, f64, Vec<(usize, usize)>),
    ) {
        if i == allowed.len() {
            let total: f64 = current.iter().map(|&(g, p)| allowed[g][p].unwrap()).sum();
            let better = current.len() > best.0
                || (current.len() == best.0 && total > best.1)
                || (current.len() == best.0 && total == best.1 && *current < best.2);
            if better {
                *best = (current.len(), total, current.clone());
            }
            return;
        }
        search(i + 1, allowed, used, current, best);
        for p in 0..used.len() {
            if used[p] || allowed[i][p].is_none() {
                continue;
            }
            used[p] = true;
            current.push((i, p));
            search(i + 1, allowed, used, current, best);
            current.pop();
            used[p] = false;
        }
    }

    let mut used = vec![false; preds.len()];
    let mut current = Vec::new();
    let mut best = (0usize, 0.0f64, Vec::new());
    search(0, &allowed, &mut used, &mut current, &mut best);

    let pairs: Vec<(Uid, Uid, f64)> = best
        .2
        .iter()
        .map(|&(g, p)| {
            (
                gts[g].uid.clone(),
                preds[p].uid.clone(),
                allowed[g][p].unwrap(),
            )
        })
        .collect();
    Ok(ExhaustiveMatch {
        total_overlap: best.1,
        pairs,
    })
}

/// Curves recomputed the slow way, indexed by `t - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceCurves {
    pub recall: Vec<Option<f64>>,
    pub precision: Vec<Option<f64>>,
    pub longevity_rate: Vec<f64>,
    pub longevity_total: Vec<usize>,
}

struct RefSeq {
    first: usize,
    len: usize,
    present: BTreeSet<usize>,
}

/// Evaluate `pred` against `gt` from first principles: exhaustive matching
/// per frame, then every curve point recomputed independently for every
/// window length (per-sequence averaging only). Limited to small inputs.
pub fn reference_curves(
    gt: &TrackSet,
    pred: &TrackSet,
    criterion: UidCriterion,
    cfg: &EvalConfig,
) -> Result<ReferenceCurves> {
    let video_length = gt.video_length();
    if pred.video_length() != video_length {
        return Err(Error::InvalidInput(format!(
            "video lengths differ: {} vs {}",
            video_length,
            pred.video_length()
        )));
    }
    if video_length > MAX_VIDEO {
        return Err(Error::InvalidInput(format!(
            "reference evaluation handles videos up to {MAX_VIDEO} frames"
        )));
    }

    let mut seqs: BTreeMap<Uid, RefSeq> = BTreeMap::new();
    for e in gt.iter() {
        let s = seqs.entry(e.uid.clone()).or_insert(RefSeq {
            first: e.frame,
            len: 0,
            present: BTreeSet::new(),
        });
        s.first = s.first.min(e.frame);
        s.present.insert(e.frame);
    }
    if seqs.is_empty() {
        return Err(Error::InvalidInput(
            "ground truth has no entities".to_string(),
        ));
    }
    if seqs.len() > MAX_ENTITIES {
        return Err(Error::InvalidInput(format!(
            "reference evaluation handles up to {MAX_ENTITIES} entities"
        )));
    }
    for s in seqs.values_mut() {
        s.len = video_length - s.first;
    }

    // Frame-by-frame pass: exhaustive matching, association bookkeeping,
    // attributed boxes on absence frames.
    let mut ledger = LabelLedger::new();
    let mut matched_gt: BTreeMap<Uid, BTreeMap<usize, f64>> = BTreeMap::new();
    let mut matched_pred: BTreeMap<(Uid, usize), f64> = BTreeMap::new();
    let mut fp_frames: BTreeMap<Uid, BTreeSet<usize>> = BTreeMap::new();
    for frame in 0..video_length {
        let gts: Vec<&EntityFrame> = gt.at_frame(frame).collect();
        let preds: Vec<&EntityFrame> = pred.at_frame(frame).collect();
        let m = exhaustive_match(&gts, &preds, &ledger, criterion, cfg.iou_min)?;
        for (g, p, iou) in &m.pairs {
            ledger.record(g, p);
            matched_gt.entry(g.clone()).or_default().insert(frame, *iou);
            matched_pred.insert((p.clone(), frame), *iou);
        }
        for pe in &preds {
            if matched_pred.contains_key(&(pe.uid.clone(), frame)) {
                continue;
            }
            if let Some(owner) = ledger.owner(&pe.uid) {
                let seq = &seqs[owner];
                if frame >= seq.first && !seq.present.contains(&frame) {
                    fp_frames.entry(owner.clone()).or_default().insert(frame);
                }
            }
        }
    }

    // Attributed predicted boxes per entity, and orphan pseudo-sequences.
    let mut attributed: BTreeMap<Uid, Vec<(usize, f64)>> = BTreeMap::new();
    for (pred_uid, owner) in &ledger.pred_owner {
        let seq = &seqs[owner];
        for e in pred.of_uid(pred_uid) {
            if e.frame < seq.first {
                continue;
            }
            let v = matched_pred
                .get(&(pred_uid.clone(), e.frame))
                .copied()
                .unwrap_or(0.0);
            attributed
                .entry(owner.clone())
                .or_default()
                .push((e.frame, v));
        }
    }
    let mut orphan_lens: Vec<usize> = Vec::new();
    for uid in pred.uids() {
        if ledger.owner(uid).is_none() {
            let first = pred.of_uid(uid).map(|e| e.frame).min().unwrap();
            orphan_lens.push(video_length - first);
        }
    }

    let max_len = seqs.values().map(|s| s.len).max().unwrap();

    let mut recall = Vec::with_capacity(max_len);
    for t in 1..=max_len {
        let mut means = Vec::new();
        for (uid, s) in &seqs {
            if s.len < t {
                continue;
            }
            let mut vals = Vec::new();
            for off in 0..t {
                let f = s.first + off;
                if s.present.contains(&f) {
                    let v = matched_gt
                        .get(uid)
                        .and_then(|m| m.get(&f))
                        .copied()
                        .unwrap_or(0.0);
                    vals.push(v);
                }
            }
            if !vals.is_empty() {
                means.push(vals.iter().sum::<f64>() / vals.len() as f64);
            }
        }
        recall.push((!means.is_empty()).then(|| means.iter().sum::<f64>() / means.len() as f64));
    }

    let max_precision_len = attributed
        .keys()
        .map(|uid| seqs[uid].len)
        .chain(orphan_lens.iter().copied())
        .max()
        .unwrap_or(0);
    let mut precision = Vec::with_capacity(max_precision_len);
    for t in 1..=max_precision_len {
        let mut means = Vec::new();
        for (uid, events) in &attributed {
            let s = &seqs[uid];
            if s.len < t {
                continue;
            }
            let vals: Vec<f64> = events
                .iter()
                .filter(|(f, _)| f - s.first < t)
                .map(|&(_, v)| v)
                .collect();
            if !vals.is_empty() {
                means.push(vals.iter().sum::<f64>() / vals.len() as f64);
            }
        }
        let orphans = orphan_lens.iter().filter(|&&l| l >= t).count();
        let denom = means.len() + orphans;
        precision.push((denom > 0).then(|| means.iter().sum::<f64>() / denom as f64));
    }

    let mut longevity_rate = Vec::with_capacity(max_len);
    let mut longevity_total = Vec::with_capacity(max_len);
    for t in 1..=max_len {
        let mut total = 0usize;
        let mut successes = 0usize;
        for (uid, s) in &seqs {
            if s.len < t {
                continue;
            }
            total += 1;
            let mut clean = true;
            for off in 0..t {
                let f = s.first + off;
                let ok = if s.present.contains(&f) {
                    matched_gt.get(uid).is_some_and(|m| m.contains_key(&f))
                } else {
                    !fp_frames.get(uid).is_some_and(|set| set.contains(&f))
                };
                if !ok {
                    clean = false;
                    break;
                }
            }
            successes += usize::from(clean);
        }
        longevity_rate.push(successes as f64 / total as f64);
        longevity_total.push(total);
    }

    Ok(ReferenceCurves {
        recall,
        precision,
        longevity_rate,
        longevity_total,
    })
}
