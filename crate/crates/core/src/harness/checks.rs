//! Self-checks run from the command line: risk-estimate unbiasedness, runtime
//! scaling of the estimation pipeline, and threshold calibration.

use std::hint::black_box;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::beamspace::{naive_dft, sorted_power, to_beamspace, ComplexVec};
use crate::channel::{calibrate_signal, draw_channel, draw_noise, make_snapshot, ArrayGeometry};
use crate::denoise::Denoiser;
use crate::error::{Error, Result};
use crate::estimators::{blind_from_power, estimate_noise_power, BlindEstimate, SureTerms};
use crate::harness::config::{db_to_linear, ExperimentConfig};
use crate::harness::sweep::Welford;
use crate::seed::{substream, trial_seed};

/// Relative gap allowed between mean risk estimate and measured MSE.
pub const UNBIASEDNESS_TOLERANCE: f64 = 0.02;

/// Bound on the average time ratio between consecutive array-size doublings.
pub const DOUBLING_RATIO_LIMIT: f64 = 2.6;

/// Fast and naive-DFT pipelines must agree to this (absolute, on `N̂₀` and `P̂ₓ`).
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct UnbiasednessPoint {
    pub snr_db: f64,
    pub mean_sure: f64,
    pub mean_mse: f64,
    /// Standard error of the per-trial difference `SURE − MSE`.
    pub diff_std_err: f64,
    pub relative_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UnbiasednessReport {
    pub denoiser: Denoiser,
    pub trials: usize,
    pub tolerance: f64,
    pub points: Vec<UnbiasednessPoint>,
    pub pass: bool,
}

/// Mean of the known-noise risk estimate against the measured MSE for one
/// fixed channel, over `config.trials` noise draws per SNR.
///
/// The channel is drawn once from `config.seed` and rescaled to each SNR. The
/// denoiser runs in beamspace.
pub fn run_unbiasedness_check(
    config: &ExperimentConfig,
    snr_db: &[f64],
    denoiser: &Denoiser,
) -> Result<UnbiasednessReport> {
    config.validate()?;
    if snr_db.is_empty() {
        return Err(Error::invalid("snr_db", "[]", "need at least one SNR"));
    }
    let geometry = config.geometry()?;
    let channel = draw_channel(&geometry, config.paths, config.seed)?;
    let mut points = Vec::with_capacity(snr_db.len());
    for (k, &db) in snr_db.iter().enumerate() {
        let x = calibrate_signal(channel.h(), db_to_linear(db), config.n0)?;
        let x_b = to_beamspace(&x);
        let per_trial: Vec<(f64, f64)> = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let noise = draw_noise(x.len(), config.n0, trial_seed(substream(config.seed, 2), k as u64, t as u64))?;
                let y_b = to_beamspace(&x.add(&noise)?);
                let sure = SureTerms::compute(&y_b, denoiser).with_noise_power(config.n0).mse_hat;
                let mse = denoiser.apply(&y_b).distance_sqr(&x_b)? / x.len() as f64;
                Ok((sure, mse))
            })
            .collect::<Result<_>>()?;
        let (mut sure, mut mse, mut diff) = (Welford::default(), Welford::default(), Welford::default());
        for &(s, m) in &per_trial {
            sure.push(s);
            mse.push(m);
            diff.push(s - m);
        }
        let relative_gap = (sure.mean() - mse.mean()).abs() / mse.mean().abs();
        points.push(UnbiasednessPoint {
            snr_db: db,
            mean_sure: sure.mean(),
            mean_mse: mse.mean(),
            diff_std_err: diff.std() / (config.trials as f64).sqrt(),
            relative_gap,
            pass: relative_gap <= UNBIASEDNESS_TOLERANCE,
        });
    }
    let pass = points.iter().all(|p| p.pass);
    Ok(UnbiasednessReport {
        denoiser: *denoiser,
        trials: config.trials,
        tolerance: UNBIASEDNESS_TOLERANCE,
        points,
        pass,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchPoint {
    pub antennas: usize,
    pub seconds_per_run: f64,
    /// Largest deviation of `N̂₀` or `P̂ₓ` between FFT and naive-DFT pipelines.
    pub oracle_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub points: Vec<BenchPoint>,
    /// `time(M_{k+1}) / time(M_k)`.
    pub ratios: Vec<f64>,
    pub mean_ratio: Option<f64>,
    /// Least-squares slope of log time against log M.
    pub fitted_exponent: Option<f64>,
    pub oracle_ok: bool,
    pub pass: bool,
}

fn pipeline(y: &ComplexVec, gamma: f64) -> Result<BlindEstimate> {
    blind_from_power(y, &sorted_power(&to_beamspace(y)), gamma)
}

fn naive_pipeline(y: &ComplexVec, gamma: f64) -> Result<BlindEstimate> {
    blind_from_power(y, &sorted_power(&naive_dft(y)), gamma)
}

fn time_per_run(y: &ComplexVec, gamma: f64) -> Result<f64> {
    // enough repetitions for ~20 ms per batch, best of five batches
    let start = Instant::now();
    black_box(pipeline(black_box(y), gamma)?);
    let single = start.elapsed().as_secs_f64().max(1e-7);
    let reps = ((0.02 / single) as usize).clamp(10, 1_000_000);
    let mut best = f64::INFINITY;
    for _ in 0..5 {
        let start = Instant::now();
        for _ in 0..reps {
            black_box(pipeline(black_box(y), gamma)?);
        }
        best = best.min(start.elapsed().as_secs_f64() / reps as f64);
    }
    Ok(best)
}

/// Times the full estimation pipeline (transform, sort, noise floor search,
/// signal power and SNR) for each array size, and cross-checks it against the
/// same pipeline built on the naive DFT.
pub fn run_scaling_bench(antenna_counts: &[usize], gamma: f64, seed: u64) -> Result<BenchReport> {
    if antenna_counts.is_empty() {
        return Err(Error::invalid("M list", "[]", "need at least one size"));
    }
    if let Some(m) = antenna_counts.iter().find(|&&m| m < 2) {
        return Err(Error::invalid("M list", m, "sizes must be at least 2"));
    }
    if antenna_counts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("M list", format!("{antenna_counts:?}"), "must be strictly increasing"));
    }
    let mut points = Vec::new();
    for &m in antenna_counts {
        let geometry = ArrayGeometry::ula(m)?;
        let snapshot = make_snapshot(&geometry, 3, db_to_linear(3.0), 1.0, seed)?;
        let fast = pipeline(&snapshot.y, gamma)?;
        let slow = naive_pipeline(&snapshot.y, gamma)?;
        let oracle_deviation = (fast.noise.n0_hat - slow.noise.n0_hat).abs().max((fast.p_x_hat - slow.p_x_hat).abs());
        points.push(BenchPoint { antennas: m, seconds_per_run: time_per_run(&snapshot.y, gamma)?, oracle_deviation });
    }
    let ratios: Vec<f64> = points.windows(2).map(|w| w[1].seconds_per_run / w[0].seconds_per_run).collect();
    let mean_ratio = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
    let fitted_exponent = (points.len() >= 2).then(|| {
        let xs: Vec<f64> = points.iter().map(|p| (p.antennas as f64).ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.seconds_per_run.ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        sxy / sxx
    });
    let oracle_ok = points.iter().all(|p| p.oracle_deviation <= ORACLE_TOLERANCE);
    let pass = oracle_ok && mean_ratio.is_none_or(|r| r <= DOUBLING_RATIO_LIMIT);
    Ok(BenchReport { points, ratios, mean_ratio, fitted_exponent, oracle_ok, pass })
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationRow {
    pub gamma: f64,
    /// Mean `N̂₀` at each SNR of the config grid.
    pub mean_n0: Vec<f64>,
    /// Mean over the grid of `|mean N̂₀ − N₀| / N₀`.
    pub objective: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationReport {
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub rows: Vec<CalibrationRow>,
    pub best_gamma: f64,
}

/// `0.25, 0.5, …, 8`.
pub fn default_gamma_grid() -> Vec<f64> {
    (1..=32).map(|i| i as f64 * 0.25).collect()
}

/// Evaluates every threshold in `gammas` on the snapshots of the config's SNR
/// grid and picks the one with the smallest mean absolute relative bias of
/// `N̂₀`. Ties go to the smaller threshold.
pub fn calibrate_gamma(config: &ExperimentConfig, gammas: &[f64]) -> Result<CalibrationReport> {
    config.validate()?;
    if gammas.is_empty() {
        return Err(Error::invalid("gamma grid", "[]", "must be nonempty"));
    }
    if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::invalid("gamma grid", g, "values must be positive and finite"));
    }
    let geometry = config.geometry()?;
    // sums[g][k]: sum of N̂₀ over trials for gamma g at grid point k
    let mut sums = vec![vec![0.0; config.snr_grid_db.len()]; gammas.len()];
    for (k, &db) in config.snr_grid_db.iter().enumerate() {
        let rho = db_to_linear(db);
        let per_trial: Vec<Vec<f64>> = (0..config.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(config.seed, k as u64, t as u64);
                let snapshot = make_snapshot(&geometry, config.paths, rho, config.n0, seed)?;
                let power = sorted_power(&to_beamspace(&snapshot.y));
                gammas.iter().map(|&g| Ok(estimate_noise_power(&power, g)?.n0_hat)).collect()
            })
            .collect::<Result<_>>()?;
        for trial in &per_trial {
            for (g, n0_hat) in trial.iter().enumerate() {
                sums[g][k] += n0_hat;
            }
        }
    }
    let trials = config.trials as f64;
    let rows: Vec<CalibrationRow> = gammas
        .iter()
        .zip(&sums)
        .map(|(&gamma, s)| {
            let mean_n0: Vec<f64> = s.iter().map(|v| v / trials).collect();
            let objective =
                mean_n0.iter().map(|m| (m - config.n0).abs() / config.n0).sum::<f64>() / mean_n0.len() as f64;
            CalibrationRow { gamma, mean_n0, objective }
        })
        .collect();
    let objectives: Vec<f64> = rows.iter().map(|r| r.objective).collect();
    let best = crate::denoise::argmin_first(&objectives).expect("nonempty");
    Ok(CalibrationReport {
        snr_grid_db: config.snr_grid_db.clone(),
        trials: config.trials,
        best_gamma: gammas[best],
        rows,
    })
}
