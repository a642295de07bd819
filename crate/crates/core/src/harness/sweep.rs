//! Monte Carlo sweep over SNR.
//!
//! Trials may run on any number of workers. Each trial's generator is seeded by
//! [`trial_seed`] from `(seed, grid index, trial index)` and results are folded
//! in trial order, so the aggregates do not depend on scheduling.

use rayon::prelude::*;
use serde::Serialize;

use crate::beamspace::{sorted_power, to_beamspace};
use crate::channel::{make_snapshot, ArrayGeometry};
use crate::denoise::Denoiser;
use crate::error::{Error, Result};
use crate::estimators::{blind_from_power, SureTerms};
use crate::harness::config::{db_to_linear, linear_to_db, ExperimentConfig};
use crate::seed::trial_seed;

/// SNR estimates of zero are floored here before conversion to dB.
pub const RHO_DB_FLOOR: f64 = -60.0;

/// Everything measured on one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialRecord {
    pub grid_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub n0_hat: f64,
    pub split_index: usize,
    pub p_x_hat: f64,
    /// Linear; `+inf` or NaN for the zero-noise outcomes.
    pub rho_hat: f64,
    pub mse_blind: f64,
    pub mse_sure: f64,
    pub mse_true: f64,
}

impl TrialRecord {
    pub fn rho_hat_db(&self) -> f64 {
        linear_to_db(self.rho_hat).max(RHO_DB_FLOOR)
    }
}

/// One trial. The denoiser runs in beamspace, where the signal is sparse.
pub fn run_trial(
    geometry: &ArrayGeometry,
    config: &ExperimentConfig,
    denoiser: &Denoiser,
    grid_index: usize,
    trial: usize,
) -> Result<TrialRecord> {
    let rho = db_to_linear(config.snr_grid_db[grid_index]);
    let seed = trial_seed(config.seed, grid_index as u64, trial as u64);
    let snapshot = make_snapshot(geometry, config.paths, rho, config.n0, seed)?;
    let y_b = to_beamspace(&snapshot.y);
    let x_b = to_beamspace(&snapshot.x);
    let blind = blind_from_power(&snapshot.y, &sorted_power(&y_b), config.gamma)?;

    let terms = SureTerms::compute(&y_b, denoiser);
    let mse_blind = terms.with_noise_power(blind.noise.n0_hat).mse_hat;
    let mse_sure = terms.with_noise_power(config.n0).mse_hat;
    let mse_true = denoiser.apply(&y_b).distance_sqr(&x_b)? / geometry.antennas() as f64;

    Ok(TrialRecord {
        grid_index,
        trial,
        seed,
        n0_hat: blind.noise.n0_hat,
        split_index: blind.noise.split_index,
        p_x_hat: blind.p_x_hat,
        rho_hat: blind.snr.linear(),
        mse_blind,
        mse_sure,
        mse_true,
    })
}

/// Streaming mean and sample variance (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Welford {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation; 0 for fewer than two values.
    pub fn std(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).sqrt()
        }
    }

    pub fn stat(&self) -> Stat {
        Stat { mean: self.mean(), std: self.std() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

/// Aggregates at one SNR grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub trials: usize,
    pub n0: Stat,
    pub p_x: Stat,
    /// Linear SNR estimate.
    pub rho: Stat,
    /// Per-trial SNR estimate in dB, floored at [`RHO_DB_FLOOR`].
    pub rho_db: Stat,
    pub mse_blind: Stat,
    pub mse_sure: Stat,
    pub mse_true: Stat,
    pub split_index_mean: f64,
}

impl SweepPoint {
    /// Folds trial records in the order given.
    pub fn aggregate(snr_db: f64, records: &[TrialRecord]) -> Self {
        let mut n0 = Welford::default();
        let mut p_x = Welford::default();
        let mut rho = Welford::default();
        let mut rho_db = Welford::default();
        let mut mse_blind = Welford::default();
        let mut mse_sure = Welford::default();
        let mut mse_true = Welford::default();
        let mut split = Welford::default();
        for r in records {
            n0.push(r.n0_hat);
            p_x.push(r.p_x_hat);
            rho.push(r.rho_hat);
            rho_db.push(r.rho_hat_db());
            mse_blind.push(r.mse_blind);
            mse_sure.push(r.mse_sure);
            mse_true.push(r.mse_true);
            split.push(r.split_index as f64);
        }
        SweepPoint {
            snr_db,
            trials: records.len(),
            n0: n0.stat(),
            p_x: p_x.stat(),
            rho: rho.stat(),
            rho_db: rho_db.stat(),
            mse_blind: mse_blind.stat(),
            mse_sure: mse_sure.stat(),
            mse_true: mse_true.stat(),
            split_index_mean: split.mean(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    pub points: Vec<SweepPoint>,
}

/// Runs the sweep on the global thread pool.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    Ok(run_sweep_detailed(config, None, false)?.0)
}

/// Runs the sweep on a dedicated pool of `workers` threads.
pub fn run_sweep_with_workers(config: &ExperimentConfig, workers: usize) -> Result<SweepResult> {
    Ok(run_sweep_detailed(config, Some(workers), false)?.0)
}

/// Sweep plus, when `keep_trials` is set, every trial record in
/// (grid index, trial index) order.
pub fn run_sweep_detailed(
    config: &ExperimentConfig,
    workers: Option<usize>,
    keep_trials: bool,
) -> Result<(SweepResult, Option<Vec<TrialRecord>>)> {
    config.validate()?;
    let run = || sweep_inner(config, keep_trials);
    match workers {
        None => run(),
        Some(workers) => {
            if workers == 0 {
                return Err(Error::invalid("workers", 0, "must be at least 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(run)
        }
    }
}

fn sweep_inner(config: &ExperimentConfig, keep_trials: bool) -> Result<(SweepResult, Option<Vec<TrialRecord>>)> {
    let geometry = config.geometry()?;
    let denoiser = Denoiser::soft_threshold(config.lambda)?;
    let mut points = Vec::with_capacity(config.snr_grid_db.len());
    let mut kept = keep_trials.then(Vec::new);
    for (grid_index, &snr_db) in config.snr_grid_db.iter().enumerate() {
        // indexed collect preserves trial order regardless of scheduling
        let records: Vec<TrialRecord> = (0..config.trials)
            .into_par_iter()
            .map(|trial| run_trial(&geometry, config, &denoiser, grid_index, trial))
            .collect::<Result<_>>()?;
        points.push(SweepPoint::aggregate(snr_db, &records));
        if let Some(kept) = kept.as_mut() {
            kept.extend(records);
        }
    }
    Ok((SweepResult { config: config.clone(), points }, kept))
}
