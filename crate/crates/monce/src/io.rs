//! File formats: CSV track files, key=value evaluation configs, and the
//! JSON report.
//!
//! Track files are CSV with a required header `frame,uid,x,y,w,h` or
//! `frame,uid,x,y,w,h,conf`; `#` starts a comment line and blank lines
//! are skipped. Errors carry the file path and 1-based line number of the
//! offending row. A header-only file parses as an empty track set — a
//! tracker that produced nothing is valid input; missing ground truth is
//! rejected later, where the evaluation needs it.

use std::fs;
use std::path::Path;

use std::collections::BTreeSet;

use crate::config::{BandwidthRule, EvalConfig};
use crate::geometry::BoundingBox;
use crate::matcher::UidCriterion;
use crate::metrics::MetricReport;
use crate::model::{EntityFrame, TrackSet, Uid};
use crate::{Error, Result};

fn parse_err(origin: &str, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.into(),
        line,
        message: message.into(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

const BASE_COLUMNS: [&str; 6] = ["frame", "uid", "x", "y", "w", "h"];

/// Parse CSV track data. `origin` labels error messages (usually the file
/// path).
pub fn parse_tracks(text: &str, origin: &str) -> Result<TrackSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let header = match records.next() {
        None => {
            return Err(parse_err(
                origin,
                1,
                "missing header line `frame,uid,x,y,w,h[,conf]`",
            ))
        }
        Some(Err(e)) => return Err(csv_error(origin, e)),
        Some(Ok(rec)) => rec,
    };
    let header_line = line_of(&header);
    let fields: Vec<String> = header.iter().map(|f| f.to_ascii_lowercase()).collect();
    let has_conf = match fields.len() {
        6 if fields == BASE_COLUMNS => false,
        7 if fields[..6] == BASE_COLUMNS && fields[6] == "conf" => true,
        _ => {
            return Err(parse_err(
                origin,
                header_line,
                format!(
                    "expected header `frame,uid,x,y,w,h[,conf]`, found `{}`",
                    fields.join(",")
                ),
            ))
        }
    };
    let arity = if has_conf { 7 } else { 6 };

    let mut entries = Vec::new();
    let mut seen: BTreeSet<(usize, String)> = BTreeSet::new();
    for record in records {
        let record = record.map_err(|e| csv_error(origin, e))?;
        let line = line_of(&record);
        if record.len() != arity {
            return Err(parse_err(
                origin,
                line,
                format!("expected {arity} fields, found {}", record.len()),
            ));
        }
        let frame: usize = record[0]
            .parse()
            .map_err(|_| parse_err(origin, line, format!("invalid frame `{}`", &record[0])))?;
        let uid = record[1].to_string();
        if uid.is_empty() {
            return Err(parse_err(origin, line, "empty uid"));
        }
        let coord = |i: usize| -> Result<f64> {
            record[i].parse().map_err(|_| {
                parse_err(
                    origin,
                    line,
                    format!("invalid {} `{}`", BASE_COLUMNS[i], &record[i]),
                )
            })
        };
        let bbox = BoundingBox::new(coord(2)?, coord(3)?, coord(4)?, coord(5)?)
            .map_err(|e| parse_err(origin, line, e.to_string()))?;
        let confidence = if has_conf && !record[6].is_empty() {
            let c: f64 = record[6]
                .parse()
                .map_err(|_| parse_err(origin, line, format!("invalid conf `{}`", &record[6])))?;
            Some(c)
        } else {
            None
        };
        if !seen.insert((frame, uid.clone())) {
            return Err(parse_err(
                origin,
                line,
                format!("duplicate entry for uid `{uid}` at frame {frame}"),
            ));
        }
        let entry = EntityFrame::new(frame, Uid::new(uid), bbox, confidence)
            .map_err(|e| parse_err(origin, line, e.to_string()))?;
        entries.push(entry);
    }

    if entries.is_empty() {
        return TrackSet::new(Vec::new(), 1);
    }
    TrackSet::from_entries(entries)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

fn csv_error(origin: &str, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    parse_err(origin, line, e.to_string())
}

/// Read and parse a CSV track file.
pub fn read_track_file(path: &Path) -> Result<TrackSet> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_tracks(&text, &path.display().to_string())
}

/// Render a track set as CSV, frames ascending and UIDs ascending within
/// a frame. The `conf` column appears only when some entry carries a
/// confidence. Output is byte-deterministic for a given track set.
pub fn tracks_to_csv(tracks: &TrackSet) -> String {
    let has_conf = tracks.iter().any(|e| e.confidence.is_some());
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header: Vec<&str> = BASE_COLUMNS.to_vec();
    if has_conf {
        header.push("conf");
    }
    writer.write_record(&header).expect("csv write to vec");
    for frame in 0..tracks.video_length() {
        for e in tracks.at_frame(frame) {
            let mut row = vec![
                e.frame.to_string(),
                e.uid.as_str().to_string(),
                e.bbox.x.to_string(),
                e.bbox.y.to_string(),
                e.bbox.w.to_string(),
                e.bbox.h.to_string(),
            ];
            if has_conf {
                row.push(e.confidence.map(|c| c.to_string()).unwrap_or_default());
            }
            writer.write_record(&row).expect("csv write to vec");
        }
    }
    String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv output is utf-8")
}

/// Write a track set as a CSV file.
pub fn write_track_file(path: &Path, tracks: &TrackSet) -> Result<()> {
    fs::write(path, tracks_to_csv(tracks)).map_err(|e| io_err(path, e))
}

/// Parse a `key = value` config. `#` starts a comment, blank lines are
/// skipped, keys may appear once. Unknown keys are rejected so a typo
/// cannot silently fall back to a default.
pub fn parse_config(text: &str, origin: &str) -> Result<EvalConfig> {
    let mut cfg = EvalConfig::default();
    let mut seen = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            parse_err(
                origin,
                line_no,
                format!("expected `key = value`, found `{line}`"),
            )
        })?;
        let key = key.trim();
        let value = value.trim();
        if !seen.insert(key.to_string()) {
            return Err(parse_err(origin, line_no, format!("duplicate key `{key}`")));
        }
        let bad_value = || {
            parse_err(
                origin,
                line_no,
                format!("invalid value `{value}` for `{key}`"),
            )
        };
        match key {
            "iou_min" => cfg.iou_min = value.parse().map_err(|_| bad_value())?,
            "reid_threshold" => cfg.reid_threshold = value.parse().map_err(|_| bad_value())?,
            "kde_density_fraction" => {
                cfg.kde_density_fraction = value.parse().map_err(|_| bad_value())?
            }
            "kde_bandwidth_rule" => {
                cfg.kde_bandwidth_rule = if value == "silverman" {
                    BandwidthRule::Silverman
                } else if let Some(h) = value.strip_prefix("fixed:") {
                    BandwidthRule::Fixed(h.trim().parse().map_err(|_| bad_value())?)
                } else {
                    return Err(bad_value());
                }
            }
            "localization_grid_step" => {
                cfg.localization_grid_step = value.parse().map_err(|_| bad_value())?
            }
            "use_kde_range" => cfg.use_kde_range = parse_bool(value).ok_or_else(bad_value)?,
            "pooled_averaging" => cfg.pooled_averaging = parse_bool(value).ok_or_else(bad_value)?,
            "video_length" => {
                cfg.video_length_override = Some(value.parse().map_err(|_| bad_value())?)
            }
            _ => return Err(parse_err(origin, line_no, format!("unknown key `{key}`"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn parse_bool(value: &str) -> Option<bool> {
    match value {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

/// Read and parse a config file.
pub fn read_config_file(path: &Path) -> Result<EvalConfig> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_config(&text, &path.display().to_string())
}

/// Serialize a report as pretty-printed JSON with a trailing newline.
/// Key order is fixed, so equal reports serialize to equal bytes.
pub fn report_to_json(report: &MetricReport) -> Result<String> {
    let mut json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Internal(format!("report serialization failed: {e}")))?;
    json.push('\n');
    Ok(json)
}

/// Write a report as a JSON file.
pub fn write_report_file(path: &Path, report: &MetricReport) -> Result<()> {
    fs::write(path, report_to_json(report)?).map_err(|e| io_err(path, e))
}

/// Read both track files, reconcile their video lengths, and evaluate.
///
/// The files only record boxes, so the video length is the longest
/// implied by either file — or the configured override, which may extend
/// a video past its last box but never truncate one.
pub fn evaluate_files(
    gt_path: &Path,
    pred_path: &Path,
    cfg: &EvalConfig,
    criteria: &[UidCriterion],
) -> Result<MetricReport> {
    let gt = read_track_file(gt_path)?;
    let pred = read_track_file(pred_path)?;
    let video_length = gt
        .video_length()
        .max(pred.video_length())
        .max(cfg.video_length_override.unwrap_or(0));
    let gt = gt.with_video_length(video_length)?;
    let pred = pred.with_video_length(video_length)?;
    crate::metrics::assemble_report_for(&gt, &pred, cfg, criteria)
}

/// Read a report back from JSON.
pub fn read_report_file(path: &Path) -> Result<MetricReport> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| parse_err(&path.display().to_string(), e.line() as u64, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::assemble_report;

    fn ef(frame: usize, uid: &str, x: f64, conf: Option<f64>) -> EntityFrame {
        EntityFrame::new(
            frame,
            Uid::new(uid),
            BoundingBox::new(x, 2.0, 10.0, 10.0).unwrap(),
            conf,
        )
        .unwrap()
    }

    #[test]
    fn csv_round_trip_without_confidence() {
        let tracks = TrackSet::new(
            vec![
                ef(0, "a", 1.5, None),
                ef(0, "b", 20.0, None),
                ef(2, "a", 3.25, None),
            ],
            4,
        )
        .unwrap();
        let csv = tracks_to_csv(&tracks);
        assert!(csv.starts_with("frame,uid,x,y,w,h\n"));
        let parsed = parse_tracks(&csv, "test").unwrap();
        // Video length is re-inferred from the data, not carried by the file.
        assert_eq!(parsed.video_length(), 3);
        let round: Vec<_> = parsed.iter().cloned().collect();
        let orig: Vec<_> = tracks.iter().cloned().collect();
        assert_eq!(round, orig);
    }

    #[test]
    fn csv_round_trip_with_confidence() {
        let tracks =
            TrackSet::from_entries(vec![ef(0, "a", 0.1, Some(0.875)), ef(1, "a", 0.2, None)])
                .unwrap();
        let csv = tracks_to_csv(&tracks);
        assert!(csv.starts_with("frame,uid,x,y,w,h,conf\n"));
        // The entry without a confidence round-trips as an empty field.
        assert!(csv.contains("0.2,2,10,10,\n"));
        let parsed = parse_tracks(&csv, "test").unwrap();
        assert_eq!(parsed.iter().next().unwrap().confidence, Some(0.875));
        assert_eq!(parsed.iter().nth(1).unwrap().confidence, None);
    }

    #[test]
    fn csv_output_is_deterministic() {
        let tracks = TrackSet::from_entries(vec![
            ef(1, "z", 7.0, None),
            ef(0, "m", 1.0, None),
            ef(1, "a", 2.0, None),
        ])
        .unwrap();
        assert_eq!(tracks_to_csv(&tracks), tracks_to_csv(&tracks));
        // Rows come out frame-major, uid-minor regardless of insert order.
        let keys: Vec<String> = tracks_to_csv(&tracks)
            .lines()
            .skip(1)
            .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(","))
            .collect();
        assert_eq!(keys, ["0,m", "1,a", "1,z"]);
    }

    #[test]
    fn missing_header_is_rejected() {
        let err = parse_tracks("0,a,1,2,3,4\n", "t.csv").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(
            parse_tracks("", "t.csv"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn header_only_parses_as_empty_tracks() {
        let parsed = parse_tracks("frame,uid,x,y,w,h\n", "t.csv").unwrap();
        assert!(parsed.is_empty());
    }

    #[test]
    fn bad_field_reports_its_line() {
        let text = "frame,uid,x,y,w,h\n# lane one\n\n0,a,0,0,5,5\n1,a,0,0,oops,5\n";
        let err = parse_tracks(text, "t.csv").unwrap_err();
        match err {
            Error::Parse {
                line, ref message, ..
            } => {
                assert_eq!(line, 5);
                assert!(message.contains("invalid w"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn degenerate_box_reports_its_line() {
        let text = "frame,uid,x,y,w,h\n0,a,0,0,0,5\n";
        let err = parse_tracks(text, "t.csv").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_row_reports_its_line() {
        let text = "frame,uid,x,y,w,h\n0,a,0,0,5,5\n0,a,1,1,5,5\n";
        let err = parse_tracks(text, "t.csv").unwrap_err();
        match err {
            Error::Parse {
                line, ref message, ..
            } => {
                assert_eq!(line, 3);
                assert!(message.contains("duplicate"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn wrong_arity_is_rejected() {
        let text = "frame,uid,x,y,w,h\n0,a,0,0,5\n";
        assert!(matches!(
            parse_tracks(text, "t.csv"),
            Err(Error::Parse { line: 2, .. })
        ));
        // conf values are only allowed when the header declares the column.
        let text = "frame,uid,x,y,w,h\n0,a,0,0,5,5,0.9\n";
        assert!(matches!(
            parse_tracks(text, "t.csv"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn config_round_trip_of_every_key() {
        let text = "\
# evaluation settings
iou_min = 0.25
reid_threshold = 12
kde_density_fraction = 0.4
kde_bandwidth_rule = fixed: 2.5
localization_grid_step = 0.1
use_kde_range = false
pooled_averaging = true
video_length = 500
";
        let cfg = parse_config(text, "cfg").unwrap();
        assert_eq!(cfg.iou_min, 0.25);
        assert_eq!(cfg.reid_threshold, 12);
        assert_eq!(cfg.kde_density_fraction, 0.4);
        assert_eq!(cfg.kde_bandwidth_rule, BandwidthRule::Fixed(2.5));
        assert_eq!(cfg.localization_grid_step, 0.1);
        assert!(!cfg.use_kde_range);
        assert!(cfg.pooled_averaging);
        assert_eq!(cfg.video_length_override, Some(500));
    }

    #[test]
    fn empty_config_is_the_default() {
        assert_eq!(parse_config("", "cfg").unwrap(), EvalConfig::default());
        assert_eq!(
            parse_config("# nothing\n\n", "cfg").unwrap(),
            EvalConfig::default()
        );
    }

    #[test]
    fn config_rejects_unknown_and_duplicate_keys() {
        let err = parse_config("iou_mn = 0.5\n", "cfg").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err:?}");
        let err = parse_config("iou_min = 0.1\niou_min = 0.2\n", "cfg").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn config_bad_values_report_key_and_line() {
        for (text, line) in [
            ("iou_min = lots\n", 1),
            ("\nuse_kde_range = yes\n", 2),
            ("kde_bandwidth_rule = gaussian\n", 1),
            ("kde_bandwidth_rule = fixed:abc\n", 1),
        ] {
            let err = parse_config(text, "cfg").unwrap_err();
            match err {
                Error::Parse { line: l, .. } => assert_eq!(l, line, "{text}"),
                other => panic!("unexpected error {other:?} for {text}"),
            }
        }
        // Values that parse but violate the constraints fail validation.
        assert!(matches!(
            parse_config("iou_min = 1.5\n", "cfg"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn report_json_round_trips_and_is_deterministic() {
        let gt = TrackSet::from_entries((0..6).map(|f| ef(f, "g", 0.0, None)).collect()).unwrap();
        let pred = TrackSet::from_entries(
            (0..6)
                .filter(|&f| f != 3)
                .map(|f| ef(f, "p", 0.0, None))
                .collect(),
        )
        .unwrap();
        let pred = pred.with_video_length(6).unwrap();
        let cfg = EvalConfig::default();
        let report = assemble_report(&gt, &pred, &cfg).unwrap();
        let json = report_to_json(&report).unwrap();
        assert!(json.ends_with('\n'));

        let again = assemble_report(&gt, &pred, &cfg).unwrap();
        assert_eq!(json, report_to_json(&again).unwrap());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        write_report_file(&path, &report).unwrap();
        let back = read_report_file(&path).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn track_file_io_errors_carry_the_path() {
        let missing = Path::new("/nonexistent/tracks.csv");
        match read_track_file(missing) {
            Err(Error::Io { path, .. }) => assert!(path.ends_with("tracks.csv")),
            other => panic!("unexpected result {other:?}"),
        }
    }
}
