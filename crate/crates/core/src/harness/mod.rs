//! Monte Carlo experiment engine behind the `beamsnr` command line.

pub mod checks;
pub mod config;
pub mod output;
pub mod plot;
pub mod sweep;

use std::path::PathBuf;

pub use checks::{
    calibrate_gamma, run_scaling_bench, run_unbiasedness_check, BenchReport, CalibrationReport, UnbiasednessReport,
};
pub use config::ExperimentConfig;
pub use output::{emit_csv, Manifest};
pub use plot::emit_plots;
pub use sweep::{run_sweep, run_sweep_with_workers, SweepPoint, SweepResult, TrialRecord};

use crate::error::Result;

/// Runs a sweep and writes everything under `config.outputs`: `sweep.csv`, the
/// per-figure tables, the SVG charts, optionally `trials.csv`, and
/// `manifest.json`. Returns the written paths.
pub fn sweep_to_dir(config: &ExperimentConfig, workers: Option<usize>, dump_trials: bool) -> Result<Vec<PathBuf>> {
    let (result, trials) = sweep::run_sweep_detailed(config, workers, dump_trials)?;
    let dir = &config.outputs;
    let mut files = Vec::new();

    let path = dir.join("sweep.csv");
    emit_csv(&result, &path)?;
    files.push(path);
    for (name, table) in output::figure_csvs(&result) {
        let path = dir.join(name);
        output::write_file(&path, &table)?;
        files.push(path);
    }
    files.extend(emit_plots(&result, dir)?);
    if let Some(trials) = trials {
        let path = dir.join("trials.csv");
        output::write_file(&path, &output::trial_log_csv(&trials))?;
        files.push(path);
    }
    let manifest = Manifest::new("sweep", config, &files).write(dir, "manifest.json")?;
    files.push(manifest);
    Ok(files)
}
