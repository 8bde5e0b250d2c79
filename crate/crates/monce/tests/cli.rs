//! End-to-end checks of the command-line binary: the synth -> evaluate ->
//! plot pipeline, exit codes, and cross-process determinism of outputs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use anyhow::{ensure, Context, Result};

const CHART_NAMES: [&str; 6] = [
    "recall.svg",
    "precision.svg",
    "longevity_counts.svg",
    "longevity_rate.svg",
    "localization.svg",
    "absence.svg",
];

fn monce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monce"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn write_scenario(dir: &Path) -> Result<std::path::PathBuf> {
    let path = dir.join("scenario.txt");
    fs::write(
        &path,
        "# two lanes, one brief dropout\n\
         video_length = 40\n\
         canvas = 200,100\n\
         entity = uid=a start=20,10 size=12,12 vel=2,0\n\
         entity = uid=b start=20,50 size=12,12 vel=1,0 birth=5 absences=15..18\n\
         degrade = drop uid=a from=30 to=32\n",
    )?;
    Ok(path)
}

#[test]
fn synth_evaluate_plot_pipeline() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let scenario = write_scenario(dir.path())?;
    let gt = dir.path().join("gt.csv");
    let pred = dir.path().join("pred.csv");

    let out = monce(&[
        "synth",
        "--scenario",
        scenario.to_str().unwrap(),
        "--seed",
        "5",
        "--out-gt",
        gt.to_str().unwrap(),
        "--out-pred",
        pred.to_str().unwrap(),
    ]);
    ensure!(exit_code(&out) == 0, "synth failed: {out:?}");
    ensure!(gt.exists() && pred.exists(), "synth must write both CSVs");

    let run_dir = dir.path().join("run1");
    let out = monce(&[
        "evaluate",
        "--gt",
        gt.to_str().unwrap(),
        "--pred",
        pred.to_str().unwrap(),
        "--out",
        run_dir.to_str().unwrap(),
    ]);
    ensure!(exit_code(&out) == 0, "evaluate failed: {out:?}");
    let stdout = String::from_utf8(out.stdout)?;
    ensure!(
        stdout.contains("EAO"),
        "summary missing from stdout: {stdout}"
    );

    let report_path = run_dir.join("report.json");
    let report_bytes = fs::read(&report_path).context("report.json written")?;
    let report: monce::MetricReport = serde_json::from_slice(&report_bytes)?;
    ensure!(
        report.criteria.len() == 2,
        "default run scores both criteria"
    );
    for name in CHART_NAMES {
        ensure!(run_dir.join(name).exists(), "missing chart {name}");
    }

    // A second process over the same inputs reproduces the report and
    // charts byte for byte.
    let run2 = dir.path().join("run2");
    let out = monce(&[
        "evaluate",
        "--gt",
        gt.to_str().unwrap(),
        "--pred",
        pred.to_str().unwrap(),
        "--out",
        run2.to_str().unwrap(),
    ]);
    ensure!(exit_code(&out) == 0, "second evaluate failed: {out:?}");
    ensure!(
        fs::read(run2.join("report.json"))? == report_bytes,
        "reports differ between identical runs"
    );

    // Re-rendering from the saved report reproduces the charts exactly.
    let plots = dir.path().join("plots");
    let out = monce(&[
        "plot",
        "--report",
        report_path.to_str().unwrap(),
        "--out",
        plots.to_str().unwrap(),
    ]);
    ensure!(exit_code(&out) == 0, "plot failed: {out:?}");
    for name in CHART_NAMES {
        ensure!(
            fs::read(plots.join(name))? == fs::read(run_dir.join(name))?,
            "chart {name} differs between evaluate and plot"
        );
    }
    Ok(())
}

#[test]
fn missing_input_exits_with_the_input_code() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let out = monce(&[
        "evaluate",
        "--gt",
        "/nonexistent/gt.csv",
        "--pred",
        "/nonexistent/pred.csv",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    ensure!(exit_code(&out) == 2, "want exit 2, got {out:?}");
    let stderr = String::from_utf8(out.stderr)?;
    ensure!(stderr.starts_with("error:"), "stderr: {stderr}");
    ensure!(stderr.contains("gt.csv"), "stderr names the file: {stderr}");
    Ok(())
}

#[test]
fn malformed_rows_exit_with_the_input_code_and_line() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let gt = dir.path().join("gt.csv");
    fs::write(
        &gt,
        "frame,uid,x,y,w,h\n0,a,1,2,3,4\n1,a,not-a-number,2,3,4\n",
    )?;
    let pred = dir.path().join("pred.csv");
    fs::write(&pred, "frame,uid,x,y,w,h\n0,p,1,2,3,4\n")?;
    let out = monce(&[
        "evaluate",
        "--gt",
        gt.to_str().unwrap(),
        "--pred",
        pred.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    ensure!(exit_code(&out) == 2, "want exit 2, got {out:?}");
    let stderr = String::from_utf8(out.stderr)?;
    ensure!(stderr.contains(":3:"), "stderr points at the row: {stderr}");
    Ok(())
}

#[test]
fn empty_ground_truth_is_an_evaluation_error() -> Result<()> {
    // A header-only file parses fine; the failure is semantic (nothing to
    // score), so it exits 1 rather than 2.
    let dir = tempfile::tempdir()?;
    let gt = dir.path().join("gt.csv");
    fs::write(&gt, "frame,uid,x,y,w,h\n")?;
    let pred = dir.path().join("pred.csv");
    fs::write(&pred, "frame,uid,x,y,w,h\n0,p,1,2,3,4\n")?;
    let out = monce(&[
        "evaluate",
        "--gt",
        gt.to_str().unwrap(),
        "--pred",
        pred.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    ensure!(exit_code(&out) == 1, "want exit 1, got {out:?}");
    Ok(())
}

#[test]
fn criterion_flag_limits_the_report() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let gt = dir.path().join("gt.csv");
    fs::write(&gt, "frame,uid,x,y,w,h\n0,a,1,2,3,4\n1,a,2,2,3,4\n")?;
    let out_dir = dir.path().join("out");
    let out = monce(&[
        "evaluate",
        "--gt",
        gt.to_str().unwrap(),
        "--pred",
        gt.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--criterion",
        "original",
    ]);
    ensure!(exit_code(&out) == 0, "evaluate failed: {out:?}");
    let report: monce::MetricReport =
        serde_json::from_slice(&fs::read(out_dir.join("report.json"))?)?;
    ensure!(
        report.criteria.keys().collect::<Vec<_>>() == ["original_uid"],
        "criteria: {:?}",
        report.criteria.keys()
    );
    ensure!(report.summary_criterion == "original_uid");
    Ok(())
}

#[test]
fn config_file_feeds_the_run_and_bad_keys_exit_with_the_input_code() -> Result<()> {
    let dir = tempfile::tempdir()?;
    let gt = dir.path().join("gt.csv");
    fs::write(&gt, "frame,uid,x,y,w,h\n0,a,1,2,3,4\n1,a,2,2,3,4\n")?;
    let cfg = dir.path().join("eval.cfg");
    fs::write(&cfg, "reid_threshold = 5\nuse_kde_range = false\n")?;
    let out_dir = dir.path().join("out");
    let out = monce(&[
        "evaluate",
        "--gt",
        gt.to_str().unwrap(),
        "--pred",
        gt.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    ensure!(exit_code(&out) == 0, "evaluate failed: {out:?}");
    let report: monce::MetricReport =
        serde_json::from_slice(&fs::read(out_dir.join("report.json"))?)?;
    ensure!(report.config.reid_threshold == 5);
    ensure!(report.averaging_range.source == "full_observed");

    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "no_such_knob = 1\n")?;
    let out = monce(&[
        "evaluate",
        "--gt",
        gt.to_str().unwrap(),
        "--pred",
        gt.to_str().unwrap(),
        "--config",
        bad.to_str().unwrap(),
        "--out",
        dir.path().join("out2").to_str().unwrap(),
    ]);
    ensure!(exit_code(&out) == 2, "want exit 2, got {out:?}");
    Ok(())
}
