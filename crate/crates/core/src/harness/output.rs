//! CSV tables and run manifests.
//!
//! Numbers are written with Rust's shortest round-trip `f64` formatting, so the
//! files parse back to the exact values and are byte-stable across runs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::config::{db_to_linear, ExperimentConfig};
use crate::harness::sweep::{SweepResult, TrialRecord};

pub const SWEEP_HEADER: &str = "snr_db,n0_mean,n0_std,px_mean,px_std,rho_mean_db,rho_std_db,\
mse_blind_mean,mse_sure_mean,mse_true_mean,trials";

pub const TRIAL_LOG_HEADER: &str =
    "grid_index,trial,seed,n0_hat,split_index,p_x_hat,rho_hat,mse_blind,mse_sure,mse_true";

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// The main sweep table, one row per SNR point.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for p in &result.points {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            p.snr_db,
            p.n0.mean,
            p.n0.std,
            p.p_x.mean,
            p.p_x.std,
            p.rho_db.mean,
            p.rho_db.std,
            p.mse_blind.mean,
            p.mse_sure.mean,
            p.mse_true.mean,
            p.trials
        );
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_file(path, &sweep_csv(result))
}

/// Per-figure tables, each carrying its ground-truth reference column.
pub fn figure_csvs(result: &SweepResult) -> Vec<(&'static str, String)> {
    let n0 = result.config.n0;
    let mut noise = String::from("snr_db,n0_true,n0_mean,n0_std\n");
    let mut signal = String::from("snr_db,px_true,px_mean,px_std\n");
    let mut snr = String::from("snr_db,rho_true_db,rho_mean_db,rho_std_db\n");
    let mut mse = String::from("snr_db,mse_true_mean,mse_sure_mean,mse_blind_mean,mse_blind_std\n");
    for p in &result.points {
        let _ = writeln!(noise, "{},{},{},{}", p.snr_db, n0, p.n0.mean, p.n0.std);
        let _ = writeln!(signal, "{},{},{},{}", p.snr_db, db_to_linear(p.snr_db) * n0, p.p_x.mean, p.p_x.std);
        let _ = writeln!(snr, "{},{},{},{}", p.snr_db, p.snr_db, p.rho_db.mean, p.rho_db.std);
        let _ = writeln!(
            mse,
            "{},{},{},{},{}",
            p.snr_db, p.mse_true.mean, p.mse_sure.mean, p.mse_blind.mean, p.mse_blind.std
        );
    }
    vec![("noise_power.csv", noise), ("signal_power.csv", signal), ("snr.csv", snr), ("mse.csv", mse)]
}

pub fn trial_log_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(TRIAL_LOG_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.grid_index,
            r.trial,
            r.seed,
            r.n0_hat,
            r.split_index,
            r.p_x_hat,
            r.rho_hat,
            r.mse_blind,
            r.mse_sure,
            r.mse_true
        );
    }
    out
}

/// Parses a file written by [`trial_log_csv`].
pub fn parse_trial_log(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(TRIAL_LOG_HEADER) {
        return Err(Error::Config("trial log: unexpected header".into()));
    }
    lines
        .filter(|l| !l.is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(Error::Config(format!("trial log: bad row {line:?}")));
            }
            let bad = |_| Error::Config(format!("trial log: bad number in {line:?}"));
            let int = |s: &str| s.parse::<u64>().map_err(|_| Error::Config(format!("trial log: bad row {line:?}")));
            Ok(TrialRecord {
                grid_index: int(f[0])? as usize,
                trial: int(f[1])? as usize,
                seed: int(f[2])?,
                n0_hat: f[3].parse().map_err(bad)?,
                split_index: int(f[4])? as usize,
                p_x_hat: f[5].parse().map_err(bad)?,
                rho_hat: f[6].parse().map_err(bad)?,
                mse_blind: f[7].parse().map_err(bad)?,
                mse_sure: f[8].parse().map_err(bad)?,
                mse_true: f[9].parse().map_err(bad)?,
            })
        })
        .collect()
}

/// Provenance written next to every output set.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a ExperimentConfig,
    pub files: Vec<String>,
}

impl<'a> Manifest<'a> {
    pub fn new(command: &'a str, config: &'a ExperimentConfig, files: &[PathBuf]) -> Self {
        Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: config.seed,
            config,
            files: files
                .iter()
                .map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default())
                .collect(),
        }
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        let path = dir.join(name);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        write_file(&path, &(text + "\n"))?;
        Ok(path)
    }
}
