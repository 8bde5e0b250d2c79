//! Synthetic track generation: scripted entities on linear paths plus
//! controlled degradations of the tracker output.
//!
//! A [`Scenario`] describes ground truth exactly (no randomness); the
//! prediction starts as a perfect copy and each [`Degradation`] then
//! damages it in a specific, measurable way. Degradations apply in their
//! listed order to the evolving prediction, so e.g. a `StaleHold` after a
//! `Drop` holds boxes across the dropped frames too. Randomized
//! degradations (jitter offsets, clutter placement) draw from a seeded
//! generator, so a scenario plus a seed reproduces byte-identical tracks.
//!
//! With integer-valued geometry in the scenario, every generated
//! coordinate is an integer: offsets and positions are drawn as integers
//! and paths are integer linear combinations. Scaling such tracks by an
//! integer factor is then exact in floating point.

pub mod oracle;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::BoundingBox;
use crate::model::{EntityFrame, TrackSet, Uid};
use crate::{Error, Result};

/// One scripted entity: present from `birth` to `end` (inclusive) except
/// during `absences`, moving on a straight line.
#[derive(Debug, Clone, PartialEq)]
pub struct EntitySpec {
    pub uid: Uid,
    pub birth: usize,
    /// Last present frame, inclusive.
    pub end: usize,
    /// Top-left corner at `birth`.
    pub start: (f64, f64),
    /// Displacement per frame.
    pub vel: (f64, f64),
    pub size: (f64, f64),
    /// Inclusive frame ranges the entity is out of view; must lie
    /// strictly between `birth` and `end` and must not overlap.
    pub absences: Vec<(usize, usize)>,
}

impl EntitySpec {
    /// Box the entity occupies at `frame` (ignoring absences).
    fn bbox_at(&self, frame: usize) -> BoundingBox {
        let dt = (frame - self.birth) as f64;
        BoundingBox::new(
            self.start.0 + self.vel.0 * dt,
            self.start.1 + self.vel.1 * dt,
            self.size.0,
            self.size.1,
        )
        .expect("validated entity geometry")
    }

    fn is_absent(&self, frame: usize) -> bool {
        self.absences.iter().any(|&(a, b)| (a..=b).contains(&frame))
    }

    fn present_frames(&self) -> impl Iterator<Item = usize> + '_ {
        (self.birth..=self.end).filter(|&f| !self.is_absent(f))
    }
}

/// Which track set a [`Degradation::UidReset`] rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResetTarget {
    Pred,
    Gt,
}

/// One controlled defect applied to the prediction (or, for
/// `UidReset { target: Gt }`, to the ground truth after the prediction
/// was copied — modeling annotations that re-key an entity the tracker
/// follows under one stable id).
#[derive(Debug, Clone, PartialEq)]
pub enum Degradation {
    /// Swap the UIDs of two boxes on a single frame.
    UidSwap { frame: usize, a: Uid, b: Uid },
    /// Remove all boxes of `uid` on frames `from..=to`.
    Drop { uid: Uid, from: usize, to: usize },
    /// Shift each box of `uid` by an integer offset drawn uniformly from
    /// `[-amount, amount]` per axis per frame.
    Jitter { uid: Uid, amount: u32 },
    /// Add `per_frame` boxes per frame, placed at integer positions in
    /// the horizontal band below every entity path, so they overlap
    /// nothing real. UIDs are unique per box.
    Clutter { per_frame: usize, size: (f64, f64) },
    /// After each disappearance of `uid`, keep repeating its last box for
    /// up to `extra` frames.
    StaleHold { uid: Uid, extra: usize },
    /// Re-key every UID once per `period` frames: a box at frame `f`
    /// changes UID from `x` to `x@k` with `k = f / period`.
    UidReset { period: usize, target: ResetTarget },
}

/// A video's worth of scripted entities plus tracker defects.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub video_length: usize,
    /// Width and height of the coordinate space; entities must fit in it.
    pub canvas: (f64, f64),
    pub entities: Vec<EntitySpec>,
    pub degradations: Vec<Degradation>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidInput(msg));
        if self.video_length == 0 {
            return invalid("scenario video_length must be at least 1".into());
        }
        if !(self.canvas.0 > 0.0 && self.canvas.1 > 0.0) {
            return invalid("scenario canvas must have positive width and height".into());
        }
        if self.entities.is_empty() {
            return invalid("scenario needs at least one entity".into());
        }
        let mut uids = BTreeSet::new();
        for e in &self.entities {
            let uid = e.uid.as_str();
            if uid.is_empty() {
                return invalid("entity uid must not be empty".into());
            }
            if uid.contains('@') {
                return invalid(format!(
                    "entity uid `{uid}` must not contain `@` (reserved for uid_reset)"
                ));
            }
            if uid.starts_with("clutter-") {
                return invalid(format!(
                    "entity uid `{uid}` must not use the clutter prefix"
                ));
            }
            if !uids.insert(uid.to_string()) {
                return invalid(format!("duplicate entity uid `{uid}`"));
            }
            if e.birth > e.end {
                return invalid(format!("entity `{uid}`: birth after end"));
            }
            if e.end >= self.video_length {
                return invalid(format!(
                    "entity `{uid}`: end {} outside video of length {}",
                    e.end, self.video_length
                ));
            }
            if !(e.size.0 > 0.0 && e.size.1 > 0.0) {
                return invalid(format!("entity `{uid}`: size must be positive"));
            }
            let mut last_end = e.birth;
            for &(a, b) in &e.absences {
                if a > b {
                    return invalid(format!("entity `{uid}`: absence range {a}..{b} reversed"));
                }
                if a <= e.birth || b >= e.end {
                    return invalid(format!(
                        "entity `{uid}`: absence {a}..{b} must lie strictly inside birth..end"
                    ));
                }
                if a <= last_end {
                    return invalid(format!(
                        "entity `{uid}`: absence {a}..{b} overlaps or is out of order"
                    ));
                }
                last_end = b;
            }
            // Linear motion: containment at both endpoints implies
            // containment throughout.
            for frame in [e.birth, e.end] {
                let b = e.bbox_at(frame);
                if b.x < 0.0 || b.y < 0.0 || b.right() > self.canvas.0 || b.bottom() > self.canvas.1
                {
                    return invalid(format!(
                        "entity `{uid}`: box leaves the canvas at frame {frame}"
                    ));
                }
            }
        }
        for d in &self.degradations {
            match d {
                Degradation::UidSwap { frame, a, b } => {
                    if frame >= &self.video_length {
                        return invalid(format!("uid_swap frame {frame} outside the video"));
                    }
                    if a == b {
                        return invalid("uid_swap needs two distinct uids".into());
                    }
                }
                Degradation::Drop { from, to, .. } => {
                    if from > to {
                        return invalid(format!("drop range {from}..{to} reversed"));
                    }
                }
                Degradation::Jitter { .. } => {}
                Degradation::Clutter { per_frame, size } => {
                    if *per_frame == 0 {
                        return invalid("clutter per_frame must be at least 1".into());
                    }
                    if !(size.0 > 0.0 && size.1 > 0.0) {
                        return invalid("clutter size must be positive".into());
                    }
                }
                Degradation::StaleHold { extra, .. } => {
                    if *extra == 0 {
                        return invalid("stale_hold extra must be at least 1".into());
                    }
                }
                Degradation::UidReset { period, .. } => {
                    if *period == 0 {
                        return invalid("uid_reset period must be at least 1".into());
                    }
                }
            }
        }
        Ok(())
    }
}

fn rekey(entries: &mut [EntityFrame], period: usize) {
    for e in entries.iter_mut() {
        let epoch = e.frame / period;
        e.uid = Uid::new(format!("{}@{epoch}", e.uid.as_str()));
    }
}

/// Generate the ground-truth and prediction track sets for a scenario.
pub fn generate(scenario: &Scenario, seed: u64) -> Result<(TrackSet, TrackSet)> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut gt: Vec<EntityFrame> = Vec::new();
    for e in &scenario.entities {
        for frame in e.present_frames() {
            gt.push(
                EntityFrame::new(frame, e.uid.clone(), e.bbox_at(frame), None)
                    .expect("validated entity geometry"),
            );
        }
    }
    // Highest edge of any scripted path; clutter is placed below it.
    let paths_bottom = gt.iter().map(|e| e.bbox.bottom()).fold(0.0f64, f64::max);

    let mut pred = gt.clone();

    for d in &scenario.degradations {
        match d {
            Degradation::UidSwap { frame, a, b } => {
                for e in pred.iter_mut().filter(|e| e.frame == *frame) {
                    if e.uid == *a {
                        e.uid = b.clone();
                    } else if e.uid == *b {
                        e.uid = a.clone();
                    }
                }
            }
            Degradation::Drop { uid, from, to } => {
                pred.retain(|e| e.uid != *uid || !(*from..=*to).contains(&e.frame));
            }
            Degradation::Jitter { uid, amount } => {
                let amount = *amount as i64;
                for e in pred.iter_mut().filter(|e| e.uid == *uid) {
                    let dx = rng.gen_range(-amount..=amount) as f64;
                    let dy = rng.gen_range(-amount..=amount) as f64;
                    e.bbox = BoundingBox::new(e.bbox.x + dx, e.bbox.y + dy, e.bbox.w, e.bbox.h)
                        .expect("jitter keeps the box well-formed");
                }
            }
            Degradation::Clutter { per_frame, size } => {
                let y_lo = paths_bottom.ceil() as i64;
                let y_hi = (scenario.canvas.1 - size.1).floor() as i64;
                let x_hi = (scenario.canvas.0 - size.0).floor() as i64;
                if y_lo > y_hi || x_hi < 0 {
                    return Err(Error::InvalidInput(
                        "no room for clutter below the entity paths".into(),
                    ));
                }
                for frame in 0..scenario.video_length {
                    for i in 0..*per_frame {
                        let x = rng.gen_range(0..=x_hi) as f64;
                        let y = rng.gen_range(y_lo..=y_hi) as f64;
                        pred.push(
                            EntityFrame::new(
                                frame,
                                Uid::new(format!("clutter-{frame}-{i}")),
                                BoundingBox::new(x, y, size.0, size.1)
                                    .expect("validated clutter size"),
                                None,
                            )
                            .expect("clutter box is well-formed"),
                        );
                    }
                }
            }
            Degradation::StaleHold { uid, extra } => {
                let mut frames: BTreeMap<usize, BoundingBox> = BTreeMap::new();
                for e in pred.iter().filter(|e| e.uid == *uid) {
                    frames.insert(e.frame, e.bbox);
                }
                let occupied: BTreeSet<usize> = frames.keys().copied().collect();
                for (&f, bbox) in &frames {
                    if occupied.contains(&(f + 1)) {
                        continue;
                    }
                    for k in 1..=*extra {
                        let t = f + k;
                        if t >= scenario.video_length || occupied.contains(&t) {
                            break;
                        }
                        pred.push(
                            EntityFrame::new(t, uid.clone(), *bbox, None)
                                .expect("held box is well-formed"),
                        );
                    }
                }
            }
            Degradation::UidReset { period, target } => match target {
                ResetTarget::Pred => rekey(&mut pred, *period),
                ResetTarget::Gt => rekey(&mut gt, *period),
            },
        }
    }

    let gt = TrackSet::new(gt, scenario.video_length)?;
    let pred = TrackSet::new(pred, scenario.video_length)?;
    Ok((gt, pred))
}

fn scenario_err(origin: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.into(),
        line,
        message: message.into(),
    }
}

fn parse_kv_tokens(body: &str) -> std::result::Result<BTreeMap<&str, &str>, String> {
    let mut map = BTreeMap::new();
    for token in body.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| format!("expected `key=value`, found `{token}`"))?;
        if map.insert(k, v).is_some() {
            return Err(format!("duplicate key `{k}`"));
        }
    }
    Ok(map)
}

fn parse_pair(v: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = v
        .split_once(',')
        .ok_or_else(|| format!("expected `x,y`, found `{v}`"))?;
    let a = a
        .trim()
        .parse()
        .map_err(|_| format!("invalid number `{a}`"))?;
    let b = b
        .trim()
        .parse()
        .map_err(|_| format!("invalid number `{b}`"))?;
    Ok((a, b))
}

fn parse_range(v: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = v
        .split_once("..")
        .ok_or_else(|| format!("expected `from..to`, found `{v}`"))?;
    let a = a.parse().map_err(|_| format!("invalid frame `{a}`"))?;
    let b = b.parse().map_err(|_| format!("invalid frame `{b}`"))?;
    Ok((a, b))
}

struct FieldReader<'a> {
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> FieldReader<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str) -> std::result::Result<&'a str, String> {
        self.take(key).ok_or_else(|| format!("missing `{key}`"))
    }

    fn finish(self) -> std::result::Result<(), String> {
        match self.map.into_keys().next() {
            Some(k) => Err(format!("unknown key `{k}`")),
            None => Ok(()),
        }
    }
}

fn parse_entity(body: &str, video_length: usize) -> std::result::Result<EntitySpec, String> {
    let mut r = FieldReader {
        map: parse_kv_tokens(body)?,
    };
    let uid = Uid::new(r.require("uid")?);
    let start = parse_pair(r.require("start")?)?;
    let size = parse_pair(r.require("size")?)?;
    let birth = match r.take("birth") {
        Some(v) => v.parse().map_err(|_| format!("invalid birth `{v}`"))?,
        None => 0,
    };
    let end = match r.take("end") {
        Some(v) => v.parse().map_err(|_| format!("invalid end `{v}`"))?,
        None => video_length.saturating_sub(1),
    };
    let vel = match r.take("vel") {
        Some(v) => parse_pair(v)?,
        None => (0.0, 0.0),
    };
    let absences = match r.take("absences") {
        Some(v) => v
            .split(';')
            .map(parse_range)
            .collect::<std::result::Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    r.finish()?;
    Ok(EntitySpec {
        uid,
        birth,
        end,
        start,
        vel,
        size,
        absences,
    })
}

fn parse_degradation(body: &str) -> std::result::Result<Degradation, String> {
    let (kind, rest) = match body.trim().split_once(char::is_whitespace) {
        Some((k, r)) => (k, r),
        None => (body.trim(), ""),
    };
    let mut r = FieldReader {
        map: parse_kv_tokens(rest)?,
    };
    let parsed = match kind {
        "uid_swap" => Degradation::UidSwap {
            frame: r
                .require("frame")?
                .parse()
                .map_err(|_| "invalid frame".to_string())?,
            a: Uid::new(r.require("a")?),
            b: Uid::new(r.require("b")?),
        },
        "drop" => Degradation::Drop {
            uid: Uid::new(r.require("uid")?),
            from: r
                .require("from")?
                .parse()
                .map_err(|_| "invalid from".to_string())?,
            to: r
                .require("to")?
                .parse()
                .map_err(|_| "invalid to".to_string())?,
        },
        "jitter" => Degradation::Jitter {
            uid: Uid::new(r.require("uid")?),
            amount: r
                .require("amount")?
                .parse()
                .map_err(|_| "invalid amount".to_string())?,
        },
        "clutter" => Degradation::Clutter {
            per_frame: r
                .require("per_frame")?
                .parse()
                .map_err(|_| "invalid per_frame".to_string())?,
            size: parse_pair(r.require("size")?)?,
        },
        "stale_hold" => Degradation::StaleHold {
            uid: Uid::new(r.require("uid")?),
            extra: r
                .require("extra")?
                .parse()
                .map_err(|_| "invalid extra".to_string())?,
        },
        "uid_reset" => Degradation::UidReset {
            period: r
                .require("period")?
                .parse()
                .map_err(|_| "invalid period".to_string())?,
            target: match r.take("target") {
                None | Some("pred") => ResetTarget::Pred,
                Some("gt") => ResetTarget::Gt,
                Some(other) => return Err(format!("invalid target `{other}`")),
            },
        },
        other => return Err(format!("unknown degradation `{other}`")),
    };
    r.finish()?;
    Ok(parsed)
}

/// Parse the scenario text format.
///
/// Lines are `key = value`; `#` starts a comment. `video_length` and
/// `canvas = w,h` must appear before the first `entity =` line. Entities
/// and degradations are one per line:
///
/// ```text
/// video_length = 100
/// canvas = 3000,2000
/// entity = uid=a start=100,500 size=40,40 vel=3,0 birth=0 end=99 absences=20..29;50..54
/// degrade = uid_swap frame=48 a=a b=b
/// ```
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario> {
    let mut video_length: Option<usize> = None;
    let mut canvas: Option<(f64, f64)> = None;
    let mut entities = Vec::new();
    let mut degradations = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            scenario_err(
                origin,
                line_no,
                format!("expected `key = value`, found `{line}`"),
            )
        })?;
        let fail = |msg: String| scenario_err(origin, line_no, msg);
        match key.trim() {
            "video_length" => {
                let v = value
                    .trim()
                    .parse()
                    .map_err(|_| fail(format!("invalid video_length `{}`", value.trim())))?;
                video_length = Some(v);
            }
            "canvas" => canvas = Some(parse_pair(value.trim()).map_err(fail)?),
            "entity" => {
                let vl = video_length
                    .ok_or_else(|| fail("video_length must be set before entities".into()))?;
                entities.push(parse_entity(value, vl).map_err(fail)?);
            }
            "degrade" => degradations.push(parse_degradation(value).map_err(fail)?),
            other => return Err(fail(format!("unknown key `{other}`"))),
        }
    }

    let scenario = Scenario {
        video_length: video_length
            .ok_or_else(|| scenario_err(origin, 1, "missing `video_length`"))?,
        canvas: canvas.ok_or_else(|| scenario_err(origin, 1, "missing `canvas`"))?,
        entities,
        degradations,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Read and parse a scenario file.
pub fn read_scenario_file(path: &std::path::Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_scenario(&text, &path.display().to_string())
}
