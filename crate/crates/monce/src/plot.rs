//! Deterministic SVG charts for a [`MetricReport`].
//!
//! Renders each curve family as a self-contained SVG string with fixed
//! dimensions, palette, and two-decimal coordinate formatting, so the
//! same report always produces byte-identical files.

use std::fmt::Write as _;

use crate::metrics::{LengthCurve, MetricReport};

/// The chart families the CLI writes alongside the JSON report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Recall,
    Precision,
    LongevityCounts,
    LongevityRate,
    Localization,
    Absence,
}

impl PlotKind {
    pub const ALL: [PlotKind; 6] = [
        PlotKind::Recall,
        PlotKind::Precision,
        PlotKind::LongevityCounts,
        PlotKind::LongevityRate,
        PlotKind::Localization,
        PlotKind::Absence,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::Recall => "recall.svg",
            PlotKind::Precision => "precision.svg",
            PlotKind::LongevityCounts => "longevity_counts.svg",
            PlotKind::LongevityRate => "longevity_rate.svg",
            PlotKind::Localization => "localization.svg",
            PlotKind::Absence => "absence.svg",
        }
    }

    fn title(self) -> &'static str {
        match self {
            PlotKind::Recall => "Tracking recall by window length",
            PlotKind::Precision => "Tracking precision by window length",
            PlotKind::LongevityCounts => "Cleanly tracked sequences by window length",
            PlotKind::LongevityRate => "Longevity rate by window length",
            PlotKind::Localization => "Overlap distribution of stable tracks",
            PlotKind::Absence => "Absence prediction by lead length",
        }
    }

    fn x_label(self) -> &'static str {
        match self {
            PlotKind::Localization => "overlap threshold",
            PlotKind::Absence => "absence lead (frames)",
            _ => "window length (frames)",
        }
    }

    fn y_label(self) -> &'static str {
        match self {
            PlotKind::Recall => "mean overlap",
            PlotKind::Precision => "mean overlap",
            PlotKind::LongevityCounts => "sequences",
            PlotKind::LongevityRate => "fraction clean",
            PlotKind::Localization => "fraction of overlaps",
            PlotKind::Absence => "fraction predicted absent",
        }
    }
}

/// One plotted line; `None` values split it into separate segments.
struct Series {
    label: String,
    points: Vec<(f64, Option<f64>)>,
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn criterion_label(key: &str) -> String {
    match key {
        "any_uid" => "any UID".to_string(),
        "original_uid" => "original UID".to_string(),
        other => other.replace('_', " "),
    }
}

fn length_series(label: String, curve: &LengthCurve) -> Series {
    Series {
        label,
        points: curve.points.iter().map(|p| (p.t as f64, p.value)).collect(),
    }
}

fn series_for(report: &MetricReport, kind: PlotKind) -> Vec<Series> {
    match kind {
        PlotKind::Recall => report
            .criteria
            .iter()
            .map(|(key, c)| length_series(criterion_label(key), &c.recall_curve))
            .collect(),
        PlotKind::Precision => report
            .criteria
            .iter()
            .map(|(key, c)| length_series(criterion_label(key), &c.precision_curve))
            .collect(),
        PlotKind::LongevityRate => report
            .criteria
            .iter()
            .map(|(key, c)| Series {
                label: criterion_label(key),
                points: c
                    .longevity_curve
                    .points
                    .iter()
                    .map(|p| (p.t as f64, Some(p.rate)))
                    .collect(),
            })
            .collect(),
        PlotKind::LongevityCounts => {
            let mut series: Vec<Series> = report
                .criteria
                .iter()
                .map(|(key, c)| Series {
                    label: format!("clean ({})", criterion_label(key)),
                    points: c
                        .longevity_curve
                        .points
                        .iter()
                        .map(|p| (p.t as f64, Some(p.successes as f64)))
                        .collect(),
                })
                .collect();
            if let Some(c) = report.criteria.values().next() {
                series.push(Series {
                    label: "sequences in window".to_string(),
                    points: c
                        .longevity_curve
                        .points
                        .iter()
                        .map(|p| (p.t as f64, Some(p.total as f64)))
                        .collect(),
                });
            }
            series
        }
        PlotKind::Localization => vec![Series {
            label: "stable tracks".to_string(),
            points: report
                .localization_curve
                .iter()
                .map(|p| (p.threshold, p.rate))
                .collect(),
        }],
        PlotKind::Absence => vec![Series {
            label: "absence runs".to_string(),
            points: report
                .absence_curve
                .iter()
                .map(|p| (p.t_a as f64, Some(p.rate)))
                .collect(),
        }],
    }
}

/// Smallest of 1, 2, 5 (times a power of ten) at or above `target`.
fn nice_step(target: f64) -> f64 {
    if target.is_nan() || target <= 0.0 {
        return 1.0;
    }
    let base = 10f64.powf(target.log10().floor());
    for m in [1.0, 2.0, 5.0, 10.0] {
        if m * base >= target - 1e-12 {
            return m * base;
        }
    }
    10.0 * base
}

fn ticks(min: f64, max: f64, step: f64) -> Vec<f64> {
    let lo = (min / step - 1e-9).ceil() as i64;
    let hi = (max / step + 1e-9).floor() as i64;
    (lo..=hi).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    if step >= 0.999 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Render one chart as an SVG document string.
pub fn render_plot(report: &MetricReport, kind: PlotKind) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const X0: f64 = 56.0;
    const Y0: f64 = 42.0;
    const X1: f64 = 620.0;
    const Y1: f64 = 374.0;

    let series = series_for(report, kind);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {W:.0} {H:.0}\" \
         width=\"{W:.0}\" height=\"{H:.0}\" font-family=\"system-ui, sans-serif\">"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n");
    let _ = writeln!(
        svg,
        "<text x=\"{X0:.0}\" y=\"24\" font-size=\"15\" font-weight=\"600\" fill=\"#111111\">{}</text>",
        xml_escape(kind.title())
    );

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in &series {
        for &(x, y) in &s.points {
            if let Some(y) = y {
                xs.push(x);
                ys.push(y);
            }
        }
    }

    if xs.is_empty() {
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"14\" fill=\"#666666\" \
             text-anchor=\"middle\">no data</text>",
            (X0 + X1) / 2.0,
            (Y0 + Y1) / 2.0
        );
        svg.push_str("</svg>\n");
        return svg;
    }

    let (mut x_min, mut x_max) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if x_max - x_min < 1e-12 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    let y_min = 0.0;
    let y_max = if kind == PlotKind::LongevityCounts {
        let top = ys.iter().cloned().fold(1.0f64, f64::max);
        let step = nice_step(top / 5.0);
        step * (top / step).ceil()
    } else {
        1.0
    };

    let px = |x: f64| X0 + (x - x_min) / (x_max - x_min) * (X1 - X0);
    let py = |y: f64| Y1 - (y - y_min) / (y_max - y_min) * (Y1 - Y0);

    // Grid and ticks.
    let y_step = nice_step((y_max - y_min) / 5.0);
    for t in ticks(y_min, y_max, y_step) {
        let _ = writeln!(
            svg,
            "<line x1=\"{X0:.2}\" y1=\"{0:.2}\" x2=\"{X1:.2}\" y2=\"{0:.2}\" \
             stroke=\"#e3e3e3\" stroke-width=\"1\"/>",
            py(t)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"#444444\" \
             text-anchor=\"end\">{}</text>",
            X0 - 7.0,
            py(t) + 4.0,
            tick_label(t, y_step)
        );
    }
    let x_step = nice_step((x_max - x_min) / 6.0);
    for t in ticks(x_min, x_max, x_step) {
        let _ = writeln!(
            svg,
            "<line x1=\"{0:.2}\" y1=\"{Y1:.2}\" x2=\"{0:.2}\" y2=\"{1:.2}\" \
             stroke=\"#333333\" stroke-width=\"1\"/>",
            px(t),
            Y1 + 4.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"#444444\" \
             text-anchor=\"middle\">{}</text>",
            px(t),
            Y1 + 18.0,
            tick_label(t, x_step)
        );
    }

    // Axes.
    let _ = writeln!(
        svg,
        "<path d=\"M {X0:.2} {Y0:.2} L {X0:.2} {Y1:.2} L {X1:.2} {Y1:.2}\" \
         stroke=\"#333333\" stroke-width=\"1\" fill=\"none\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#333333\" \
         text-anchor=\"middle\">{}</text>",
        (X0 + X1) / 2.0,
        H - 8.0,
        xml_escape(kind.x_label())
    );
    let _ = writeln!(
        svg,
        "<text x=\"16\" y=\"{:.2}\" font-size=\"12\" fill=\"#333333\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {0:.2})\">{1}</text>",
        (Y0 + Y1) / 2.0,
        xml_escape(kind.y_label())
    );

    // Series: polyline segments split at gaps, with markers when sparse.
    let total_points: usize = series.iter().map(|s| s.points.len()).sum();
    let draw_markers = total_points <= 80;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut segment: Vec<(f64, f64)> = Vec::new();
        let flush = |seg: &mut Vec<(f64, f64)>, svg: &mut String| {
            if seg.len() > 1 {
                let mut d = String::new();
                for (j, &(x, y)) in seg.iter().enumerate() {
                    let _ = write!(
                        d,
                        "{}{:.2} {:.2}",
                        if j == 0 { "M " } else { " L " },
                        px(x),
                        py(y)
                    );
                }
                let _ = writeln!(
                    svg,
                    "<path d=\"{d}\" stroke=\"{color}\" stroke-width=\"1.5\" fill=\"none\"/>"
                );
            }
            if draw_markers || seg.len() == 1 {
                for &(x, y) in seg.iter() {
                    let _ = writeln!(
                        svg,
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.2\" fill=\"{color}\"/>",
                        px(x),
                        py(y)
                    );
                }
            }
            seg.clear();
        };
        for &(x, y) in &s.points {
            match y {
                Some(y) => segment.push((x, y)),
                None => flush(&mut segment, &mut svg),
            }
        }
        flush(&mut segment, &mut svg);
    }

    // Legend, right-aligned above the plot area.
    let est_width: f64 = series
        .iter()
        .map(|s| 30.0 + s.label.len() as f64 * 6.8)
        .sum();
    let mut lx = X1 - est_width;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            svg,
            "<line x1=\"{:.2}\" y1=\"33\" x2=\"{:.2}\" y2=\"33\" stroke=\"{color}\" \
             stroke-width=\"2.5\"/>",
            lx,
            lx + 16.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"37\" font-size=\"11\" fill=\"#333333\">{}</text>",
            lx + 20.0,
            xml_escape(&s.label)
        );
        lx += 30.0 + s.label.len() as f64 * 6.8;
    }

    svg.push_str("</svg>\n");
    svg
}

/// All chart files for a report: `(file name, svg content)` pairs.
pub fn dashboard(report: &MetricReport) -> Vec<(&'static str, String)> {
    PlotKind::ALL
        .iter()
        .map(|&k| (k.file_name(), render_plot(report, k)))
        .collect()
}
