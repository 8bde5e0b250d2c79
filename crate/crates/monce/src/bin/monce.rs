//! Command-line front end: evaluate tracker output, generate synthetic
//! tracks, and re-render charts from a saved report.
//!
//! Exit codes: 0 on success, 2 for input problems (unreadable files,
//! malformed CSV or config, bad flags), 1 for evaluation errors on
//! well-formed inputs.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use monce::io::{
    evaluate_files, read_config_file, read_report_file, write_report_file, write_track_file,
};
use monce::metrics::MetricReport;
use monce::model::TrackSet;
use monce::plot::dashboard;
use monce::synth::{generate, read_scenario_file};
use monce::{Error, EvalConfig, Result, UidCriterion};

#[derive(Parser)]
#[command(
    name = "monce",
    version,
    about = "Tracking metrics for entities that come and go"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionArg {
    /// Score both UID criteria (summary values use `any`).
    Both,
    /// A predicted UID may bind to an entity at any point.
    Any,
    /// Only the first UID an entity ever matched keeps counting.
    Original,
}

impl CriterionArg {
    fn criteria(self) -> Vec<UidCriterion> {
        match self {
            CriterionArg::Both => vec![UidCriterion::AnyUid, UidCriterion::OriginalUid],
            CriterionArg::Any => vec![UidCriterion::AnyUid],
            CriterionArg::Original => vec![UidCriterion::OriginalUid],
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Score a prediction track file against ground truth.
    Evaluate {
        /// Ground-truth CSV (frame,uid,x,y,w,h[,conf]).
        #[arg(long)]
        gt: PathBuf,
        /// Prediction CSV in the same format.
        #[arg(long)]
        pred: PathBuf,
        /// Optional key=value config file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for report.json and the charts.
        #[arg(long)]
        out: PathBuf,
        /// Which UID criteria to score.
        #[arg(long, value_enum, default_value = "both")]
        criterion: CriterionArg,
        /// Average summaries over all observed sequence lengths instead
        /// of the density-selected range.
        #[arg(long)]
        no_kde: bool,
    },
    /// Generate ground-truth and prediction CSVs from a scenario file.
    Synth {
        /// Scenario description file.
        #[arg(long)]
        scenario: PathBuf,
        /// Seed for the degradation randomness.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the ground-truth CSV.
        #[arg(long)]
        out_gt: PathBuf,
        /// Where to write the prediction CSV.
        #[arg(long)]
        out_pred: PathBuf,
    },
    /// Re-render the charts from a saved report.json.
    Plot {
        /// Report file produced by `evaluate`.
        #[arg(long)]
        report: PathBuf,
        /// Output directory for the charts.
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Evaluate {
            gt,
            pred,
            config,
            out,
            criterion,
            no_kde,
        } => evaluate(&gt, &pred, config.as_deref(), &out, criterion, no_kde),
        Command::Synth {
            scenario,
            seed,
            out_gt,
            out_pred,
        } => synth(&scenario, seed, &out_gt, &out_pred),
        Command::Plot { report, out } => {
            let report = read_report_file(&report)?;
            write_charts(&out, &report)?;
            println!(
                "wrote {} charts to {}",
                dashboard(&report).len(),
                out.display()
            );
            Ok(())
        }
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn write_charts(dir: &Path, report: &MetricReport) -> Result<()> {
    ensure_dir(dir)?;
    for (name, svg) in dashboard(report) {
        let path = dir.join(name);
        std::fs::write(&path, svg).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    Ok(())
}

fn evaluate(
    gt_path: &Path,
    pred_path: &Path,
    config_path: Option<&Path>,
    out: &Path,
    criterion: CriterionArg,
    no_kde: bool,
) -> Result<()> {
    let mut cfg = match config_path {
        Some(p) => read_config_file(p)?,
        None => EvalConfig::default(),
    };
    if no_kde {
        cfg.use_kde_range = false;
    }

    let report = evaluate_files(gt_path, pred_path, &cfg, &criterion.criteria())?;

    ensure_dir(out)?;
    write_report_file(&out.join("report.json"), &report)?;
    write_charts(out, &report)?;
    print_summary(&report);
    println!("report: {}", out.join("report.json").display());
    Ok(())
}

fn print_summary(report: &MetricReport) {
    println!(
        "sequences: {} (video length {})",
        report.sequence_count, report.video_length
    );
    println!(
        "averaging range: T in [{}, {}] ({})",
        report.averaging_range.t_lo, report.averaging_range.t_hi, report.averaging_range.source
    );
    let crit = report.summary_criterion.replace('_', " ");
    println!("EAO   {:.3}  ({crit})", report.eao);
    println!("EAO_P {:.3}", report.eao_p);
    let stats: Vec<String> = report
        .longevity_stats
        .iter()
        .map(|(p, t)| format!("T({p})={t}"))
        .collect();
    println!("longevity: {}", stats.join("  "));
    let fmt_rate = |r: Option<f64>, n: usize| match r {
        Some(v) => format!("{v:.3} ({n} runs)"),
        None => "n/a (0 runs)".to_string(),
    };
    println!(
        "re-id: short {}, long {} (threshold {})",
        fmt_rate(report.reid.short_rate, report.reid.short_count),
        fmt_rate(report.reid.long_rate, report.reid.long_count),
        report.reid.threshold
    );
}

fn synth(scenario_path: &Path, seed: u64, out_gt: &Path, out_pred: &Path) -> Result<()> {
    let scenario = read_scenario_file(scenario_path)?;
    let (gt, pred) = generate(&scenario, seed)?;
    write_parented(out_gt, &gt)?;
    write_parented(out_pred, &pred)?;
    println!(
        "wrote {} ground-truth and {} prediction boxes over {} frames",
        gt.len(),
        pred.len(),
        scenario.video_length
    );
    Ok(())
}

fn write_parented(path: &Path, tracks: &TrackSet) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            ensure_dir(parent)?;
        }
    }
    write_track_file(path, tracks)
}
