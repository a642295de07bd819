//! Blind estimators of noise power, signal power, SNR and denoiser MSE.
//!
//! The noise power estimator walks the ascending beamspace powers once. At
//! step `i` it keeps the running mean of the `i` smallest powers and stops at
//! the first gap `p(i+1) − p(i)` that reaches `γ` times that mean; the running
//! mean at the stopping point is the estimate. When no gap qualifies every
//! beam is treated as noise and all `M` powers are averaged.
//!
//! Everything else is derived from the noise estimate:
//!
//! - signal power `max{‖y‖² − M N̂₀, 0} / M`
//! - SNR `P̂ₓ / N̂₀`
//! - MSE of a denoiser `‖x̂(y) − y‖²/M + N̂₀ + (N̂₀/M) Σ_m (div_m − 2)`, which is
//!   Stein's unbiased risk estimate with the true noise power replaced by `N̂₀`.

use serde::{Deserialize, Serialize};

use crate::beamspace::{sorted_power, to_beamspace, BeamspacePower, ComplexVec};
use crate::denoise::Denoiser;
use crate::error::{Error, Result};

/// Gap threshold shipped as the default.
///
/// Chosen with `beamsnr calibrate-gamma` on the default experiment
/// (M = 64, three paths, −10..20 dB); see the README for the procedure.
pub const DEFAULT_GAMMA: f64 = 1.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseEstimate {
    pub n0_hat: f64,
    /// Number of sorted beams classified as noise, in `1..=M`.
    pub split_index: usize,
    pub gamma: f64,
}

/// Single-pass noise floor search over sorted beamspace powers.
///
/// A gap triggers when `Δp(i) ≥ γ · mean(p(1..=i))` and `Δp(i) > 0`; the
/// second condition only matters when the running mean is exactly zero.
pub fn estimate_noise_power(power: &BeamspacePower, gamma: f64) -> Result<NoiseEstimate> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::invalid("gamma", gamma, "threshold parameter must be positive and finite"));
    }
    let p = power.sorted();
    let len = p.len();
    if len < 2 {
        return Err(Error::TooShort { len, min: 2 });
    }

    let mut sum = 0.0;
    for i in 1..len {
        sum += p[i - 1];
        let mean = sum / i as f64;
        let gap = p[i] - p[i - 1];
        if gap > 0.0 && gap >= gamma * mean {
            return Ok(NoiseEstimate { n0_hat: mean, split_index: i, gamma });
        }
    }
    sum += p[len - 1];
    Ok(NoiseEstimate { n0_hat: sum / len as f64, split_index: len, gamma })
}

/// `max{‖y‖² − M N̂₀, 0} / M`.
pub fn estimate_signal_power(y: &ComplexVec, noise: &NoiseEstimate) -> f64 {
    let len = y.len() as f64;
    (y.norm_sqr() - len * noise.n0_hat).max(0.0) / len
}

/// SNR estimate, with the zero-noise cases kept distinct.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrOutcome {
    Finite(f64),
    /// Zero noise estimate with positive signal power.
    Infinite,
    /// Zero noise estimate and zero signal power.
    Undefined,
}

impl SnrOutcome {
    /// Linear value; `Infinite` maps to `+inf` and `Undefined` to NaN.
    pub fn linear(&self) -> f64 {
        match *self {
            SnrOutcome::Finite(rho) => rho,
            SnrOutcome::Infinite => f64::INFINITY,
            SnrOutcome::Undefined => f64::NAN,
        }
    }

    pub fn db(&self) -> f64 {
        10.0 * self.linear().log10()
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            SnrOutcome::Finite(rho) => Some(rho),
            _ => None,
        }
    }
}

/// `P̂ₓ / N̂₀`.
pub fn estimate_snr(p_x_hat: f64, noise: &NoiseEstimate) -> SnrOutcome {
    if noise.n0_hat > 0.0 {
        SnrOutcome::Finite(p_x_hat / noise.n0_hat)
    } else if p_x_hat > 0.0 {
        SnrOutcome::Infinite
    } else {
        SnrOutcome::Undefined
    }
}

/// Noise, signal power and SNR estimates for one antenna-domain snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlindEstimate {
    pub noise: NoiseEstimate,
    pub p_x_hat: f64,
    pub snr: SnrOutcome,
}

/// Beamspace transform, sort, noise floor search and the derived estimates.
pub fn estimate_blind(y: &ComplexVec, gamma: f64) -> Result<BlindEstimate> {
    let power = sorted_power(&to_beamspace(y));
    blind_from_power(y, &power, gamma)
}

pub(crate) fn blind_from_power(y: &ComplexVec, power: &BeamspacePower, gamma: f64) -> Result<BlindEstimate> {
    let noise = estimate_noise_power(power, gamma)?;
    let p_x_hat = estimate_signal_power(y, &noise);
    Ok(BlindEstimate { noise, p_x_hat, snr: estimate_snr(p_x_hat, &noise) })
}

/// The noise-independent parts of the risk estimate for one denoiser output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SureTerms {
    /// `‖x̂(y) − y‖² / M`.
    pub residual_term: f64,
    /// `Σ_m (∂Re x̂_m/∂Re y_m + ∂Im x̂_m/∂Im y_m)`.
    pub divergence: f64,
    pub len: usize,
}

impl SureTerms {
    pub fn compute(y: &ComplexVec, denoiser: &Denoiser) -> Self {
        let mut residual = 0.0;
        let mut divergence = 0.0;
        for &z in y.iter() {
            residual += (denoiser.apply_element(z) - z).norm_sqr();
            divergence += denoiser.element_divergence(z);
        }
        SureTerms { residual_term: residual / y.len() as f64, divergence, len: y.len() }
    }

    pub fn with_noise_power(&self, n0: f64) -> MseEstimate {
        let len = self.len as f64;
        let divergence_term = n0 / len * (self.divergence - 2.0 * len);
        MseEstimate {
            mse_hat: self.residual_term + n0 + divergence_term,
            residual_term: self.residual_term,
            divergence_term,
            noise_power: n0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MseEstimate {
    /// Can be negative for an individual snapshot; it is unbiased, not clamped.
    pub mse_hat: f64,
    pub residual_term: f64,
    /// `(N/M) Σ_m (div_m − 2)` for the noise power `N` used.
    pub divergence_term: f64,
    pub noise_power: f64,
}

/// Blind MSE estimate of `denoiser` applied to `y`, using `N̂₀`.
pub fn estimate_mse_blind(y: &ComplexVec, denoiser: &Denoiser, noise: &NoiseEstimate) -> MseEstimate {
    SureTerms::compute(y, denoiser).with_noise_power(noise.n0_hat)
}

/// The same risk estimate with the true noise power.
pub fn sure_with_known_noise(y: &ComplexVec, denoiser: &Denoiser, n0_true: f64) -> Result<MseEstimate> {
    if !(n0_true.is_finite() && n0_true >= 0.0) {
        return Err(Error::invalid("n0", n0_true, "noise power must be nonnegative and finite"));
    }
    Ok(SureTerms::compute(y, denoiser).with_noise_power(n0_true))
}
