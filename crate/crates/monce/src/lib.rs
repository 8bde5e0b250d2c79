//! Tracking metrics for entities that come and go.
//!
//! `monce` evaluates multi-object trackers on videos where entities leave
//! the frame and return: every entity is scored from its first appearance
//! to the end of the video, so identity breaks, boxes held during
//! absences, and missed reappearances all show up in the numbers instead
//! of being quietly skipped.
//!
//! The main entry point is [`metrics::assemble_report`], which takes a
//! ground-truth and a prediction [`model::TrackSet`] plus an
//! [`config::EvalConfig`] and produces a [`metrics::MetricReport`]:
//! expected average overlap (EAO) and its precision twin EAO_P, longevity
//! statistics, re-identification rates, and the underlying curves. The
//! `monce` binary wraps this in a CLI that reads CSV track files and emits
//! a JSON report plus SVG charts.

pub mod config;
pub mod error;
pub mod geometry;
pub mod io;
pub mod matcher;
pub mod metrics;
pub mod model;
pub mod plot;
pub mod synth;

pub use config::{BandwidthRule, EvalConfig};
pub use error::{Error, Result};
pub use geometry::BoundingBox;
pub use matcher::{OutcomeTable, UidCriterion};
pub use metrics::{assemble_report, assemble_report_for, MetricReport};
pub use model::{EntityFrame, TrackSet, Uid};
