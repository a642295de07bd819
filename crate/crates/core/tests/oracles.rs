//! Statistical and closed-form oracles for the channel model and estimators.
//!
//! Brackets marked "frozen" were recorded from a reference run with seeds
//! `0..10⁴` and are ±5 standard errors around the recorded mean.

use beamsnr::channel::draw_noise;
use beamsnr::denoise::sweep_lambda_with_noise_power;
use beamsnr::estimators::{estimate_blind, SureTerms, DEFAULT_GAMMA};
use beamsnr::harness::config::db_to_linear;
use beamsnr::{draw_channel, make_snapshot, sorted_power, to_beamspace, ArrayGeometry, Complex64, Denoiser};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: u64 = 10_000;

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn assert_in_frozen_bracket(name: &str, got: f64, mean: f64, se: f64) {
    let (lo, hi) = (mean - 5.0 * se, mean + 5.0 * se);
    assert!((lo..=hi).contains(&got), "{name}: {got} outside [{lo}, {hi}]");
}

fn gini(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let weighted: f64 = v.iter().enumerate().map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x).sum();
    weighted / (n * v.iter().sum::<f64>())
}

#[test]
fn soft_threshold_minimizes_the_lasso_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let z = Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let lambda = rng.random_range(0.0..4.0);
        let objective = |x: Complex64| 0.5 * (x - z).norm_sqr() + lambda * x.norm();
        let best = objective(Denoiser::soft_threshold(lambda).unwrap().apply_element(z));
        let reach = z.norm() + 1.0;
        for i in 0..=120 {
            for j in 0..=120 {
                let x =
                    Complex64::new(-reach + 2.0 * reach * i as f64 / 120.0, -reach + 2.0 * reach * j as f64 / 120.0);
                assert!(best <= objective(x) + 1e-12, "z {z}, lambda {lambda}: grid point {x} is better");
            }
        }
    }
}

#[test]
fn few_beams_carry_most_channel_energy() {
    let geometry = ArrayGeometry::ula(64).unwrap();
    let mut fractions: Vec<f64> = (0..1000)
        .map(|seed| {
            let power = sorted_power(&to_beamspace(draw_channel(&geometry, 3, seed).unwrap().h()));
            power.sorted()[61..].iter().sum::<f64>() / power.total()
        })
        .collect();
    fractions.sort_by(f64::total_cmp);
    // reference run: median 0.837
    assert!(fractions[500] >= 0.5, "median top-3 fraction {}", fractions[500]);
}

#[test]
fn beamspace_is_sparser_than_antenna_domain() {
    let geometry = ArrayGeometry::ula(64).unwrap();
    let sparser = (0..1000)
        .filter(|&seed| {
            let x = make_snapshot(&geometry, 3, 1.0, 1.0, seed).unwrap().x;
            gini(&to_beamspace(&x).powers()) > gini(&x.powers())
        })
        .count();
    assert!(sparser >= 950, "beamspace sparser in {sparser} of 1000 seeds");
}

#[test]
fn noise_power_per_element_matches_n0() {
    let draws: Vec<f64> = (0..SEEDS).map(|s| draw_noise(64, 1.0, s).unwrap().norm_sqr() / 64.0).collect();
    let (mean, _) = mean_and_se(&draws);
    // |n_m|² is exponential with unit mean, so the mean of ‖n‖²/M has variance 1/(M T)
    let se = (1.0 / (64.0 * SEEDS as f64)).sqrt();
    assert!((mean - 1.0).abs() <= 3.0 * se, "mean {mean}, 3 sigma {}", 3.0 * se);
}

#[test]
fn noise_is_white() {
    const M: usize = 8;
    let mut cov = vec![Complex64::new(0.0, 0.0); M * M];
    for s in 0..SEEDS {
        let n = draw_noise(M, 2.0, s).unwrap();
        for i in 0..M {
            for j in 0..M {
                cov[i * M + j] += n[i] * n[j].conj();
            }
        }
    }
    let mut err = 0.0;
    for i in 0..M {
        for j in 0..M {
            let target = if i == j { 2.0 } else { 0.0 };
            err += (cov[i * M + j] / SEEDS as f64 - target).norm_sqr();
        }
    }
    let relative = err.sqrt() / (2.0 * (M as f64).sqrt());
    assert!(relative <= 0.05, "relative Frobenius error {relative}");
}

#[test]
fn pure_noise_floor_estimate_is_frozen() {
    let geometry = ArrayGeometry::ula(64).unwrap();
    let n0: Vec<f64> = (0..SEEDS)
        .map(|s| {
            estimate_blind(&make_snapshot(&geometry, 3, 0.0, 1.0, s).unwrap().y, DEFAULT_GAMMA).unwrap().noise.n0_hat
        })
        .collect();
    let (mean, _) = mean_and_se(&n0);
    assert_in_frozen_bracket("pure-noise mean n0_hat", mean, 0.4085230592017125, 0.004823133314261303);
}

#[test]
fn signal_power_at_10_db_is_frozen() {
    let geometry = ArrayGeometry::ula(64).unwrap();
    let px: Vec<f64> = (0..SEEDS)
        .map(|s| estimate_blind(&make_snapshot(&geometry, 3, 10.0, 1.0, s).unwrap().y, DEFAULT_GAMMA).unwrap().p_x_hat)
        .collect();
    let (mean, _) = mean_and_se(&px);
    assert_in_frozen_bracket("mean P_x at 10 dB", mean, 10.332236402914228, 0.010156345965144682);
}

#[test]
fn snr_at_3_db_is_frozen() {
    let geometry = ArrayGeometry::ula(64).unwrap();
    let rho = db_to_linear(3.0);
    let db: Vec<f64> = (0..SEEDS)
        .map(|s| {
            let est = estimate_blind(&make_snapshot(&geometry, 3, rho, 1.0, s).unwrap().y, DEFAULT_GAMMA).unwrap();
            est.snr.db().max(-60.0)
        })
        .collect();
    let (mean, _) = mean_and_se(&db);
    assert_in_frozen_bracket("mean SNR estimate (dB) at 3 dB", mean, 16.203820768041183, 0.1309070414589947);
}

#[test]
fn blind_and_known_risk_differ_by_the_noise_error() {
    let geometry = ArrayGeometry::ula(64).unwrap();
    let den = Denoiser::soft_threshold(3.0).unwrap();
    for s in 0..200 {
        let snap = make_snapshot(&geometry, 3, db_to_linear(-10.0 + 0.15 * s as f64), 1.0, s).unwrap();
        let y_b = to_beamspace(&snap.y);
        let n0_hat = estimate_blind(&snap.y, DEFAULT_GAMMA).unwrap().noise.n0_hat;
        let terms = SureTerms::compute(&y_b, &den);
        let gap = terms.with_noise_power(n0_hat).mse_hat - terms.with_noise_power(1.0).mse_hat;
        let expected = (n0_hat - 1.0) * (terms.divergence / 64.0 - 1.0);
        assert!((gap - expected).abs() <= 1e-12, "seed {s}: {gap} vs {expected}");
    }
}

#[test]
fn threshold_sweep_edge_cases() {
    let geometry = ArrayGeometry::ula(16).unwrap();
    let y_b = to_beamspace(&make_snapshot(&geometry, 3, 2.0, 1.0, 5).unwrap().y);

    let single = sweep_lambda_with_noise_power(&y_b, &[0.0], 1.0).unwrap();
    assert_eq!((single.best_index, single.best_lambda), (0, 0.0));
    assert_eq!(single.estimated_mse, vec![1.0]);

    // a threshold above every magnitude zeroes the output
    let huge = sweep_lambda_with_noise_power(&y_b, &[0.0, 1e9], 1.0).unwrap();
    assert!((huge.estimated_mse[1] - (y_b.norm_sqr() / 16.0 - 1.0)).abs() <= 1e-12);

    assert!(sweep_lambda_with_noise_power(&y_b, &[], 1.0).is_err());
    assert!(sweep_lambda_with_noise_power(&y_b, &[1.0, 0.5], 1.0).is_err());
    assert!(sweep_lambda_with_noise_power(&y_b, &[-1.0], 1.0).is_err());
}
