//! Shared fixtures for the integration suites: seeded random scenarios
//! whose entities run in disjoint horizontal lanes (so every predicted
//! box can only ever overlap one entity), plus small track-set helpers.
//!
//! All generated geometry is integer-valued, which keeps overlap ratios
//! exactly representable and makes uniform rescaling bit-exact.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use monce::geometry::BoundingBox;
use monce::model::{EntityFrame, TrackSet, Uid};
use monce::synth::{Degradation, EntitySpec, ResetTarget, Scenario};

/// Knobs for the random scenario pool. Defaults stay inside the limits
/// of the exhaustive reference evaluator.
pub struct PoolOptions {
    pub max_entities: usize,
    pub min_video: usize,
    pub max_video: usize,
    /// Allow cross-entity label swaps. Off for properties that only hold
    /// when each predicted UID stays in one entity's lane.
    pub allow_uid_swap: bool,
    /// Allow periodic re-keying of predicted UIDs.
    pub allow_uid_reset: bool,
}

impl Default for PoolOptions {
    fn default() -> Self {
        PoolOptions {
            max_entities: 5,
            min_video: 40,
            max_video: 120,
            allow_uid_swap: true,
            allow_uid_reset: false,
        }
    }
}

/// Draw a random scenario: 1..=max entities in disjoint lanes with
/// integer sizes, speeds, births, deaths and mid-life absences, then a
/// random batch of tracker defects.
pub fn random_scenario(rng: &mut ChaCha8Rng, opts: &PoolOptions) -> Scenario {
    let video_length = rng.gen_range(opts.min_video..=opts.max_video);
    let n = rng.gen_range(1..=opts.max_entities);

    let mut entities = Vec::with_capacity(n);
    for i in 0..n {
        let birth = if rng.gen_bool(0.3) {
            rng.gen_range(0..video_length.div_ceil(3))
        } else {
            0
        };
        let end = if rng.gen_bool(0.3) {
            rng.gen_range((birth + (video_length - birth) / 2).min(video_length - 1)..video_length)
        } else {
            video_length - 1
        };

        let mut absences = Vec::new();
        if end - birth >= 12 && rng.gen_bool(0.6) {
            let mut cursor = birth + 1;
            for _ in 0..rng.gen_range(1..=2usize) {
                if cursor + 2 >= end {
                    break;
                }
                let a = rng.gen_range(cursor..end - 1);
                let b = (a + rng.gen_range(0..6usize)).min(end - 1);
                absences.push((a, b));
                cursor = b + 2;
            }
        }

        entities.push(EntitySpec {
            uid: Uid::new(format!("e{i}")),
            birth,
            end,
            start: (rng.gen_range(20..=120) as f64, (40 * i + 10) as f64),
            vel: (rng.gen_range(0..=3) as f64, 0.0),
            size: (rng.gen_range(8..=16) as f64, rng.gen_range(8..=14) as f64),
            absences,
        });
    }

    let mut kinds = vec!["drop", "jitter", "stale_hold"];
    if opts.allow_uid_swap && n >= 2 {
        kinds.push("uid_swap");
    }
    if opts.allow_uid_reset {
        kinds.push("uid_reset");
    }
    let mut degradations = Vec::new();
    for _ in 0..rng.gen_range(0..=4usize) {
        let uid = Uid::new(format!("e{}", rng.gen_range(0..n)));
        match kinds[rng.gen_range(0..kinds.len())] {
            "drop" => {
                let from = rng.gen_range(0..video_length);
                degradations.push(Degradation::Drop {
                    uid,
                    from,
                    to: (from + rng.gen_range(0..=10usize)).min(video_length - 1),
                });
            }
            "jitter" => degradations.push(Degradation::Jitter {
                uid,
                amount: rng.gen_range(1..=3),
            }),
            "stale_hold" => degradations.push(Degradation::StaleHold {
                uid,
                extra: rng.gen_range(1..=5),
            }),
            "uid_swap" => {
                let a = rng.gen_range(0..n);
                let b = (a + rng.gen_range(1..n)) % n;
                degradations.push(Degradation::UidSwap {
                    frame: rng.gen_range(0..video_length),
                    a: Uid::new(format!("e{a}")),
                    b: Uid::new(format!("e{b}")),
                });
            }
            "uid_reset" => degradations.push(Degradation::UidReset {
                period: rng.gen_range((video_length / 4).max(1)..=(video_length / 2).max(1)),
                target: ResetTarget::Pred,
            }),
            other => unreachable!("unknown degradation kind {other}"),
        }
    }

    let scenario = Scenario {
        video_length,
        // Lanes are 40 apart and at most 14 tall; the widest path ends
        // well inside this canvas.
        canvas: (600.0, (40 * n + 40) as f64),
        entities,
        degradations,
    };
    scenario.validate().expect("pool scenarios are valid");
    scenario
}

/// Rescale every box by an integer factor, keeping frames and UIDs.
pub fn scale_tracks(tracks: &TrackSet, factor: f64) -> TrackSet {
    let entries = tracks
        .iter()
        .map(|e| {
            EntityFrame::new(
                e.frame,
                e.uid.clone(),
                BoundingBox::new(
                    e.bbox.x * factor,
                    e.bbox.y * factor,
                    e.bbox.w * factor,
                    e.bbox.h * factor,
                )
                .unwrap(),
                e.confidence,
            )
            .unwrap()
        })
        .collect::<Vec<_>>();
    TrackSet::new(entries, tracks.video_length()).unwrap()
}
