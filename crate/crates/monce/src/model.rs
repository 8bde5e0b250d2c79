//! Track data model: entity-frames, track sets, and the per-entity
//! sequence/absence structure all metrics are defined over.
//!
//! An entity's *sequence* starts at its first appearance and runs to the
//! end of the video, absences included. Frames where the entity is not
//! observed form *absence runs*; a run that is still open when the video
//! ends is flagged terminal, because no reappearance can ever be scored
//! against it.

use std::collections::BTreeMap;
use std::fmt;

use crate::geometry::BoundingBox;
use crate::{Error, Result};

/// Opaque entity identifier. UIDs are compared as strings, never parsed;
/// ground-truth and predicted UIDs live in separate namespaces.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Uid(String);

impl Uid {
    pub fn new(s: impl Into<String>) -> Self {
        Uid(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Uid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Uid {
    fn from(s: &str) -> Self {
        Uid(s.to_string())
    }
}

/// One observation: an entity's box on one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityFrame {
    pub frame: usize,
    pub uid: Uid,
    pub bbox: BoundingBox,
    /// Detector confidence, if the source provides one.
    pub confidence: Option<f64>,
}

impl EntityFrame {
    pub fn new(frame: usize, uid: Uid, bbox: BoundingBox, confidence: Option<f64>) -> Result<Self> {
        if let Some(c) = confidence {
            if !(0.0..=1.0).contains(&c) || c.is_nan() {
                return Err(Error::InvalidInput(format!(
                    "confidence must be in [0, 1], got {c} (frame {frame}, uid {uid})"
                )));
            }
        }
        Ok(EntityFrame {
            frame,
            uid,
            bbox,
            confidence,
        })
    }
}

/// Immutable collection of entity-frames for one stream (ground truth or
/// predictions), indexed both by frame and by UID.
#[derive(Debug, Clone)]
pub struct TrackSet {
    video_length: usize,
    entries: Vec<EntityFrame>,
    /// Entry indices per frame, sorted by UID.
    by_frame: Vec<Vec<u32>>,
    /// Entry indices per UID, sorted by frame.
    by_uid: BTreeMap<Uid, Vec<u32>>,
}

impl TrackSet {
    /// Build a track set covering frames `0..video_length`.
    ///
    /// Rejects duplicate `(frame, uid)` pairs and frames at or beyond
    /// `video_length`.
    pub fn new(entries: Vec<EntityFrame>, video_length: usize) -> Result<Self> {
        if video_length == 0 {
            return Err(Error::InvalidInput(
                "video length must be at least 1".to_string(),
            ));
        }
        let mut by_frame: Vec<Vec<u32>> = vec![Vec::new(); video_length];
        let mut by_uid: BTreeMap<Uid, Vec<u32>> = BTreeMap::new();
        for (i, ef) in entries.iter().enumerate() {
            if ef.frame >= video_length {
                return Err(Error::InvalidInput(format!(
                    "frame {} of uid {} is outside the video (length {})",
                    ef.frame, ef.uid, video_length
                )));
            }
            by_frame[ef.frame].push(i as u32);
            by_uid.entry(ef.uid.clone()).or_default().push(i as u32);
        }
        for frames in by_uid.values_mut() {
            frames.sort_by_key(|&i| entries[i as usize].frame);
            for pair in frames.windows(2) {
                let (a, b) = (&entries[pair[0] as usize], &entries[pair[1] as usize]);
                if a.frame == b.frame {
                    return Err(Error::InvalidInput(format!(
                        "duplicate observation of uid {} at frame {}",
                        a.uid, a.frame
                    )));
                }
            }
        }
        for indices in by_frame.iter_mut() {
            indices.sort_by(|&a, &b| entries[a as usize].uid.cmp(&entries[b as usize].uid));
        }
        Ok(TrackSet {
            video_length,
            entries,
            by_frame,
            by_uid,
        })
    }

    /// Build a track set whose length is inferred as `max frame + 1`.
    /// Errors on an empty entry list, where no length can be inferred.
    pub fn from_entries(entries: Vec<EntityFrame>) -> Result<Self> {
        let max_frame = entries
            .iter()
            .map(|e| e.frame)
            .max()
            .ok_or_else(|| Error::InvalidInput("track set has no observations".to_string()))?;
        TrackSet::new(entries, max_frame + 1)
    }

    /// Same observations under a longer video. Used to put ground truth
    /// and predictions on a common timeline.
    pub fn with_video_length(&self, video_length: usize) -> Result<Self> {
        if video_length < self.video_length {
            if let Some(max_frame) = self.entries.iter().map(|e| e.frame).max() {
                if max_frame >= video_length {
                    return Err(Error::InvalidInput(format!(
                        "cannot shrink video to {video_length} frames: observations reach frame {max_frame}"
                    )));
                }
            }
        }
        TrackSet::new(self.entries.clone(), video_length)
    }

    pub fn video_length(&self) -> usize {
        self.video_length
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Entity-frames observed at `frame`, sorted by UID.
    pub fn at_frame(&self, frame: usize) -> impl Iterator<Item = &EntityFrame> {
        self.by_frame
            .get(frame)
            .into_iter()
            .flatten()
            .map(move |&i| &self.entries[i as usize])
    }

    /// Entity-frames of `uid` in ascending frame order.
    pub fn of_uid(&self, uid: &Uid) -> impl Iterator<Item = &EntityFrame> {
        self.by_uid
            .get(uid)
            .into_iter()
            .flatten()
            .map(move |&i| &self.entries[i as usize])
    }

    /// All UIDs present anywhere in the stream, ascending.
    pub fn uids(&self) -> impl Iterator<Item = &Uid> {
        self.by_uid.keys()
    }

    /// All entity-frames in (frame, uid) order.
    pub fn iter(&self) -> impl Iterator<Item = &EntityFrame> {
        self.by_frame
            .iter()
            .flatten()
            .map(move |&i| &self.entries[i as usize])
    }
}

/// One ground-truth entity viewed as a sequence from its first appearance
/// to the end of the video.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthSequence {
    pub uid: Uid,
    pub first_frame: usize,
    /// Frames from `first_frame` to the end of the video, absences included.
    pub length: usize,
    /// `presence[i]` says whether the entity is observed at frame
    /// `first_frame + i`. `presence[0]` is always true.
    pub presence: Vec<bool>,
}

impl GroundTruthSequence {
    pub fn is_present(&self, frame: usize) -> bool {
        frame >= self.first_frame
            && frame < self.first_frame + self.length
            && self.presence[frame - self.first_frame]
    }

    /// Absence runs in ascending frame order. A run whose last frame is the
    /// last video frame is terminal: the entity never reappears, so the run
    /// cannot be scored for re-identification.
    pub fn absence_runs(&self) -> Vec<AbsenceRun> {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < self.presence.len() {
            if self.presence[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < self.presence.len() && !self.presence[i] {
                i += 1;
            }
            runs.push(AbsenceRun {
                start_frame: self.first_frame + start,
                length: i - start,
                ends_at_video_end: i == self.presence.len(),
            });
        }
        runs
    }
}

/// Maximal gap in a ground-truth sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AbsenceRun {
    pub start_frame: usize,
    pub length: usize,
    pub ends_at_video_end: bool,
}

/// Derive the per-entity sequences of a ground-truth track set, sorted by
/// UID. Errors when the track set contains no entities at all.
pub fn build_sequences(gt: &TrackSet) -> Result<Vec<GroundTruthSequence>> {
    if gt.is_empty() {
        return Err(Error::InvalidInput(
            "ground truth contains no entities".to_string(),
        ));
    }
    let video_length = gt.video_length();
    let mut sequences = Vec::new();
    for uid in gt.uids() {
        let mut frames = gt.of_uid(uid).map(|e| e.frame);
        let first_frame = frames.next().expect("uid index is never empty");
        let length = video_length - first_frame;
        let mut presence = vec![false; length];
        presence[0] = true;
        for f in frames {
            presence[f - first_frame] = true;
        }
        sequences.push(GroundTruthSequence {
            uid: uid.clone(),
            first_frame,
            length,
            presence,
        });
    }
    Ok(sequences)
}
