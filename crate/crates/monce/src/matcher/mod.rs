//! Frame-by-frame matching of predictions to ground truth, UID-consistency
//! bookkeeping, and the per-frame outcome classification everything else
//! is computed from.
//!
//! The key commitments, from the evaluation model this crate implements:
//!
//! * Matching is per frame, maximizing match count first and total IOU
//!   second, over candidate pairs with `iou > iou_min`.
//! * A predicted UID belongs to at most one ground-truth entity, ever.
//!   Once associated it may never match anything else for the rest of the
//!   video ([`AssociationState`] is write-once).
//! * Under [`UidCriterion::OriginalUid`] an entity additionally only
//!   accepts the first predicted UID it was ever matched to; under
//!   [`UidCriterion::AnyUid`] any not-yet-claimed UID may pick it up after
//!   an identity break.
//! * On frames where an entity is absent, predicted boxes from UIDs
//!   associated to it count against it (attributed false positives); boxes
//!   from UIDs that never associate to anything are tracked separately as
//!   orphans and only affect precision.

mod assignment;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::config::EvalConfig;
use crate::model::{build_sequences, EntityFrame, GroundTruthSequence, TrackSet, Uid};
use crate::{Error, Result};

/// Which UIDs may re-acquire an entity after an identity break.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UidCriterion {
    /// Any predicted UID not already claimed by a different entity.
    AnyUid,
    /// Only the first predicted UID ever matched to the entity.
    OriginalUid,
}

impl UidCriterion {
    /// Stable identifier used in reports.
    pub fn key(self) -> &'static str {
        match self {
            UidCriterion::AnyUid => "any_uid",
            UidCriterion::OriginalUid => "original_uid",
        }
    }

    /// Human label used in plot legends.
    pub fn label(self) -> &'static str {
        match self {
            UidCriterion::AnyUid => "any UID",
            UidCriterion::OriginalUid => "original UID",
        }
    }
}

/// Write-once record of which predicted UID belongs to which entity.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AssociationState {
    pred_to_gt: BTreeMap<Uid, Uid>,
    gt_to_first_pred: BTreeMap<Uid, Uid>,
}

impl AssociationState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Entity this predicted UID is bound to, if any.
    pub fn pred_to_gt(&self, pred: &Uid) -> Option<&Uid> {
        self.pred_to_gt.get(pred)
    }

    /// First predicted UID ever matched to this entity, if any.
    pub fn first_pred(&self, gt: &Uid) -> Option<&Uid> {
        self.gt_to_first_pred.get(gt)
    }

    /// Number of predicted UIDs bound so far.
    pub fn associated_count(&self) -> usize {
        self.pred_to_gt.len()
    }

    /// Record a match. Binds the predicted UID on first sight and remembers
    /// the entity's first partner; neither entry is ever rewritten. A
    /// conflicting rebind means the matcher produced an ineligible pair.
    fn record(&mut self, gt: &Uid, pred: &Uid) -> Result<()> {
        match self.pred_to_gt.get(pred) {
            None => {
                self.pred_to_gt.insert(pred.clone(), gt.clone());
            }
            Some(existing) if existing == gt => {}
            Some(existing) => {
                return Err(Error::Internal(format!(
                    "attempt to rebind predicted uid {pred} from {existing} to {gt}"
                )));
            }
        }
        self.gt_to_first_pred
            .entry(gt.clone())
            .or_insert_with(|| pred.clone());
        Ok(())
    }

    /// Test-support constructor: seed an arbitrary (consistent) state.
    pub fn from_pairs(
        pred_to_gt: impl IntoIterator<Item = (Uid, Uid)>,
        gt_to_first_pred: impl IntoIterator<Item = (Uid, Uid)>,
    ) -> Result<Self> {
        let mut state = AssociationState::new();
        for (p, g) in pred_to_gt {
            if state.pred_to_gt.insert(p.clone(), g).is_some() {
                return Err(Error::Internal(format!("duplicate predicted uid {p}")));
            }
        }
        for (g, p) in gt_to_first_pred {
            if state.pred_to_gt.get(&p) != Some(&g) {
                return Err(Error::Internal(format!(
                    "first pred {p} of {g} is not bound to it"
                )));
            }
            state.gt_to_first_pred.insert(g, p);
        }
        Ok(state)
    }
}

/// May `pred` be matched to `gt` given the associations made so far?
pub fn eligible(state: &AssociationState, gt: &Uid, pred: &Uid, criterion: UidCriterion) -> bool {
    let unclaimed_or_ours = match state.pred_to_gt(pred) {
        None => true,
        Some(owner) => owner == gt,
    };
    match criterion {
        UidCriterion::AnyUid => unclaimed_or_ours,
        UidCriterion::OriginalUid => {
            unclaimed_or_ours
                && match state.first_pred(gt) {
                    None => true,
                    Some(first) => first == pred,
                }
        }
    }
}

/// One matched pair with its overlap.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchPair {
    pub gt: Uid,
    pub pred: Uid,
    pub iou: f64,
}

/// Result of matching one frame. Pairs are sorted by (gt, pred).
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatching {
    pub frame: usize,
    pub pairs: Vec<MatchPair>,
}

impl FrameMatching {
    pub fn cardinality(&self) -> usize {
        self.pairs.len()
    }

    pub fn total_iou(&self) -> f64 {
        self.pairs.iter().map(|p| p.iou).sum()
    }
}

/// Match one frame's predictions against its ground truth.
///
/// Candidate pairs are those that are eligible under `criterion` and
/// overlap strictly more than `iou_min`. Among candidates the matching
/// maximizes pair count first and total IOU second; remaining ties are
/// resolved deterministically (inputs are processed in UID order).
pub fn match_frame(
    frame: usize,
    gts: &[&EntityFrame],
    preds: &[&EntityFrame],
    state: &AssociationState,
    criterion: UidCriterion,
    iou_min: f64,
) -> FrameMatching {
    let mut gts: Vec<&EntityFrame> = gts.to_vec();
    gts.sort_by(|a, b| a.uid.cmp(&b.uid));
    let mut preds: Vec<&EntityFrame> = preds.to_vec();
    preds.sort_by(|a, b| a.uid.cmp(&b.uid));

    let mut edges = Vec::new();
    for (i, g) in gts.iter().enumerate() {
        for (j, p) in preds.iter().enumerate() {
            if !eligible(state, &g.uid, &p.uid, criterion) {
                continue;
            }
            let iou = g.bbox.iou(&p.bbox);
            if iou > iou_min {
                edges.push(assignment::Edge {
                    left: i,
                    right: j,
                    weight: iou,
                });
            }
        }
    }

    let pairs = assignment::solve(gts.len(), preds.len(), &edges)
        .into_iter()
        .map(|(i, j)| MatchPair {
            gt: gts[i].uid.clone(),
            pred: preds[j].uid.clone(),
            iou: gts[i].bbox.iou(&preds[j].bbox),
        })
        .collect();
    FrameMatching { frame, pairs }
}

/// Fold one frame's matching into the association state.
pub fn advance_association(state: &mut AssociationState, matching: &FrameMatching) -> Result<()> {
    for pair in &matching.pairs {
        state.record(&pair.gt, &pair.pred)?;
    }
    Ok(())
}

/// Per-frame verdict for one entity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// Entity present and matched, with the match overlap.
    TruePositive(f64),
    /// Entity present, nothing matched it.
    FalseNegative,
    /// Entity absent and no box of an associated UID appeared.
    TrueNegative,
    /// Entity absent but an associated UID produced a box anyway.
    FalsePositiveAttributed,
}

impl Outcome {
    pub fn is_failure(self) -> bool {
        matches!(
            self,
            Outcome::FalseNegative | Outcome::FalsePositiveAttributed
        )
    }
}

/// Outcomes of one entity over its sequence window.
#[derive(Debug, Clone)]
pub struct SequenceOutcomes {
    pub first_frame: usize,
    /// `outcomes[i]` is the verdict at frame `first_frame + i`.
    pub outcomes: Vec<Outcome>,
}

/// Everything a metric needs from one evaluation pass: per-entity outcome
/// vectors, the predicted boxes attributed to each entity, orphan
/// predictions, and the final UID associations.
#[derive(Debug, Clone)]
pub struct OutcomeTable {
    pub criterion: UidCriterion,
    pub video_length: usize,
    /// Per ground-truth UID, aligned to its sequence window.
    pub per_sequence: BTreeMap<Uid, SequenceOutcomes>,
    /// For each entity: every entity-frame of every predicted UID
    /// associated to it, as `(frame, overlap)` with overlap 0.0 where the
    /// box went unmatched. Ascending frame order; frames before the
    /// entity's first appearance are not attributed.
    pub attributed_pred_frames: BTreeMap<Uid, Vec<(usize, f64)>>,
    /// Predicted UIDs that never matched anything, with their first frame.
    pub orphan_uids: BTreeMap<Uid, usize>,
    /// Every entity-frame of an orphan UID, as `(frame, uid)`, sorted.
    pub orphan_predictions: Vec<(usize, Uid)>,
    /// Final association state after the last frame.
    pub association: AssociationState,
}

impl OutcomeTable {
    /// Outcome counts as (tp, fn, tn, fp) over all sequences.
    pub fn outcome_counts(&self) -> (usize, usize, usize, usize) {
        let (mut tp, mut fneg, mut tn, mut fp) = (0, 0, 0, 0);
        for seq in self.per_sequence.values() {
            for o in &seq.outcomes {
                match o {
                    Outcome::TruePositive(_) => tp += 1,
                    Outcome::FalseNegative => fneg += 1,
                    Outcome::TrueNegative => tn += 1,
                    Outcome::FalsePositiveAttributed => fp += 1,
                }
            }
        }
        (tp, fneg, tn, fp)
    }
}

/// Run the full matching pass and classify every (entity, frame) cell.
///
/// Frames are processed in ascending order; associations made on earlier
/// frames constrain later ones. Absence frames are judged against the
/// associations known at that frame.
pub fn classify(
    gt: &TrackSet,
    pred: &TrackSet,
    criterion: UidCriterion,
    cfg: &EvalConfig,
) -> Result<OutcomeTable> {
    cfg.validate()?;
    if gt.video_length() != pred.video_length() {
        return Err(Error::InvalidInput(format!(
            "ground truth covers {} frames but predictions cover {}",
            gt.video_length(),
            pred.video_length()
        )));
    }
    let sequences = build_sequences(gt)?;
    let seq_by_uid: BTreeMap<&Uid, &GroundTruthSequence> =
        sequences.iter().map(|s| (&s.uid, s)).collect();

    let mut state = AssociationState::new();
    // gt uid -> frame -> matched overlap
    let mut matched_gt: BTreeMap<Uid, BTreeMap<usize, f64>> = BTreeMap::new();
    // (pred uid, frame) -> matched overlap
    let mut matched_pred: HashMap<(Uid, usize), f64> = HashMap::new();
    // (gt uid, frame) cells where an associated box appeared during absence
    let mut attributed_absence: BTreeSet<(Uid, usize)> = BTreeSet::new();

    for frame in 0..gt.video_length() {
        let gts: Vec<&EntityFrame> = gt.at_frame(frame).collect();
        let preds: Vec<&EntityFrame> = pred.at_frame(frame).collect();
        let matching = match_frame(frame, &gts, &preds, &state, criterion, cfg.iou_min);
        advance_association(&mut state, &matching)?;

        let mut matched_pred_uids: BTreeSet<&Uid> = BTreeSet::new();
        for pair in &matching.pairs {
            matched_gt
                .entry(pair.gt.clone())
                .or_default()
                .insert(frame, pair.iou);
            matched_pred.insert((pair.pred.clone(), frame), pair.iou);
        }
        for pair in &matching.pairs {
            matched_pred_uids.insert(&pair.pred);
        }
        for p in &preds {
            if matched_pred_uids.contains(&p.uid) {
                continue;
            }
            if let Some(owner) = state.pred_to_gt(&p.uid) {
                let seq = seq_by_uid[owner];
                if frame >= seq.first_frame && !seq.is_present(frame) {
                    attributed_absence.insert((owner.clone(), frame));
                }
            }
        }
    }

    let mut per_sequence = BTreeMap::new();
    for seq in &sequences {
        let matches = matched_gt.get(&seq.uid);
        let outcomes = (0..seq.length)
            .map(|i| {
                let frame = seq.first_frame + i;
                if seq.presence[i] {
                    match matches.and_then(|m| m.get(&frame)) {
                        Some(&iou) => Outcome::TruePositive(iou),
                        None => Outcome::FalseNegative,
                    }
                } else if attributed_absence.contains(&(seq.uid.clone(), frame)) {
                    Outcome::FalsePositiveAttributed
                } else {
                    Outcome::TrueNegative
                }
            })
            .collect();
        per_sequence.insert(
            seq.uid.clone(),
            SequenceOutcomes {
                first_frame: seq.first_frame,
                outcomes,
            },
        );
    }

    let mut attributed_pred_frames: BTreeMap<Uid, Vec<(usize, f64)>> = BTreeMap::new();
    let mut orphan_uids = BTreeMap::new();
    let mut orphan_predictions = Vec::new();
    for uid in pred.uids() {
        match state.pred_to_gt(uid) {
            Some(owner) => {
                let seq = seq_by_uid[owner];
                let events = attributed_pred_frames.entry(owner.clone()).or_default();
                for ef in pred.of_uid(uid) {
                    if ef.frame >= seq.first_frame {
                        let overlap = matched_pred
                            .get(&(uid.clone(), ef.frame))
                            .copied()
                            .unwrap_or(0.0);
                        events.push((ef.frame, overlap));
                    }
                }
            }
            None => {
                let first = pred
                    .of_uid(uid)
                    .map(|e| e.frame)
                    .next()
                    .expect("uid index is never empty");
                orphan_uids.insert(uid.clone(), first);
                for ef in pred.of_uid(uid) {
                    orphan_predictions.push((ef.frame, uid.clone()));
                }
            }
        }
    }
    for events in attributed_pred_frames.values_mut() {
        events.sort_by_key(|&(frame, _)| frame);
    }
    orphan_predictions.sort();

    Ok(OutcomeTable {
        criterion,
        video_length: gt.video_length(),
        per_sequence,
        attributed_pred_frames,
        orphan_uids,
        orphan_predictions,
        association: state,
    })
}
