//! Element-wise shrinkage denoisers and threshold selection.
//!
//! The soft threshold is the closed-form minimizer of
//! `½‖y − x̂‖² + λ‖x̂‖₁` over complex `x̂`: every element keeps its phase and
//! loses `λ` of magnitude, and elements with `|y_m| ≤ λ` are zeroed. For
//! `|y_m| > λ` the divergence of one element,
//! `∂Re x̂_m/∂Re y_m + ∂Im x̂_m/∂Im y_m`, is `2 − λ/|y_m|`; below the threshold
//! it is 0. The boundary `|y_m| = λ` is assigned to the zero branch.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::beamspace::ComplexVec;
use crate::error::{Error, Result};
use crate::estimators::{NoiseEstimate, SureTerms};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenoiserKind {
    SoftThreshold,
    Identity,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Denoiser {
    kind: DenoiserKind,
    lambda: f64,
}

impl Denoiser {
    pub fn soft_threshold(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::invalid("lambda", lambda, "threshold must be nonnegative and finite"));
        }
        Ok(Denoiser { kind: DenoiserKind::SoftThreshold, lambda })
    }

    pub fn identity() -> Self {
        Denoiser { kind: DenoiserKind::Identity, lambda: 0.0 }
    }

    pub fn zero() -> Self {
        Denoiser { kind: DenoiserKind::Zero, lambda: 0.0 }
    }

    pub fn kind(&self) -> DenoiserKind {
        self.kind
    }

    /// Threshold; only meaningful for the soft threshold.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn apply_element(&self, y: Complex64) -> Complex64 {
        match self.kind {
            DenoiserKind::Identity => y,
            DenoiserKind::Zero => Complex64::new(0.0, 0.0),
            DenoiserKind::SoftThreshold => {
                let magnitude = y.norm();
                if magnitude > self.lambda {
                    y * ((magnitude - self.lambda) / magnitude)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }

    /// `∂Re x̂/∂Re y + ∂Im x̂/∂Im y` at `y`.
    #[inline]
    pub fn element_divergence(&self, y: Complex64) -> f64 {
        match self.kind {
            DenoiserKind::Identity => 2.0,
            DenoiserKind::Zero => 0.0,
            DenoiserKind::SoftThreshold => {
                let magnitude = y.norm();
                if magnitude > self.lambda {
                    2.0 - self.lambda / magnitude
                } else {
                    0.0
                }
            }
        }
    }

    pub fn apply(&self, y: &ComplexVec) -> ComplexVec {
        ComplexVec::from_vec_unchecked(y.iter().map(|&z| self.apply_element(z)).collect())
    }

    /// Sum of the element divergences.
    pub fn divergence(&self, y: &ComplexVec) -> f64 {
        y.iter().map(|&z| self.element_divergence(z)).sum()
    }
}

/// Estimated MSE of the soft threshold over a grid of thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSweep {
    pub grid: Vec<f64>,
    pub estimated_mse: Vec<f64>,
    pub best_index: usize,
    pub best_lambda: f64,
}

/// `0, 0.25, …, 6`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..=24).map(|i| i as f64 * 0.25).collect()
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("lambda grid", "[]", "must be nonempty"));
    }
    if let Some(l) = grid.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::invalid("lambda grid", l, "values must be nonnegative and finite"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("lambda grid", format!("{grid:?}"), "must be strictly increasing"));
    }
    Ok(())
}

/// Index of the first minimum, so ties go to the smaller threshold.
pub fn argmin_first(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, v) in values.iter().enumerate() {
        match best {
            Some(b) if v.partial_cmp(&values[b]) != Some(std::cmp::Ordering::Less) => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Picks the soft threshold minimizing the blind MSE estimate.
pub fn sweep_lambda(y: &ComplexVec, grid: &[f64], noise: &NoiseEstimate) -> Result<LambdaSweep> {
    sweep_lambda_with_noise_power(y, grid, noise.n0_hat)
}

/// As [`sweep_lambda`] with an explicit noise power (e.g. the true one).
pub fn sweep_lambda_with_noise_power(y: &ComplexVec, grid: &[f64], n0: f64) -> Result<LambdaSweep> {
    validate_grid(grid)?;
    let estimated_mse: Vec<f64> = grid
        .iter()
        .map(|&lambda| {
            let denoiser = Denoiser::soft_threshold(lambda)?;
            Ok(SureTerms::compute(y, &denoiser).with_noise_power(n0).mse_hat)
        })
        .collect::<Result<_>>()?;
    let best_index = argmin_first(&estimated_mse).expect("grid is nonempty");
    Ok(LambdaSweep { grid: grid.to_vec(), best_lambda: grid[best_index], best_index, estimated_mse })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Central differences of Re x̂ along Re y and Im x̂ along Im y.
    fn fd_divergence(d: &Denoiser, y: Complex64, step: f64) -> f64 {
        let dre = (d.apply_element(y + c(step, 0.0)).re - d.apply_element(y - c(step, 0.0)).re) / (2.0 * step);
        let dim = (d.apply_element(y + c(0.0, step)).im - d.apply_element(y - c(0.0, step)).im) / (2.0 * step);
        dre + dim
    }

    #[test]
    fn soft_threshold_closed_form() {
        let d = Denoiser::soft_threshold(3.0).unwrap();
        assert_eq!(d.apply_element(c(4.0, 0.0)), c(1.0, 0.0));
        assert_eq!(d.apply_element(c(0.0, -3.0)), c(0.0, 0.0));
        assert_eq!(d.apply_element(c(2.0, 2.0)), c(0.0, 0.0));
        let z = d.apply_element(c(3.0, 4.0));
        assert!((z - c(1.2, 1.6)).norm() < 1e-15);
    }

    #[test]
    fn zero_lambda_is_identity() {
        let d = Denoiser::soft_threshold(0.0).unwrap();
        let y = ComplexVec::from_pairs(&[(1.0, -2.0), (0.3, 0.0), (-5.0, 7.5)]).unwrap();
        let out = d.apply(&y);
        for (a, b) in out.iter().zip(y.iter()) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(d.divergence(&y), 6.0);
    }

    #[test]
    fn identity_and_zero_divergence() {
        let y = ComplexVec::from_pairs(&[(1.0, 0.0); 8]).unwrap();
        assert_eq!(Denoiser::identity().divergence(&y), 16.0);
        assert_eq!(Denoiser::zero().divergence(&y), 0.0);
        assert_eq!(Denoiser::zero().apply(&y).norm_sqr(), 0.0);
        assert_eq!(Denoiser::identity().apply(&y), y);
    }

    #[test]
    fn boundary_uses_zero_branch() {
        let d = Denoiser::soft_threshold(5.0).unwrap();
        assert_eq!(d.element_divergence(c(3.0, 4.0)), 0.0);
        assert_eq!(d.apply_element(c(3.0, 4.0)), c(0.0, 0.0));
    }

    #[test]
    fn divergence_of_single_element_matches_finite_difference() {
        let d = Denoiser::soft_threshold(3.0).unwrap();
        let y = c(4.0, 0.0);
        assert_eq!(d.element_divergence(y), 1.25);
        assert!((fd_divergence(&d, y, 1e-6) - 1.25).abs() < 1e-5);
    }

    #[test]
    fn divergence_matches_finite_difference_on_random_points() {
        let d = Denoiser::soft_threshold(3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        for _ in 0..64 {
            let y = c(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0));
            if (y.norm() - 3.0).abs() < 1e-4 {
                continue;
            }
            assert!((d.element_divergence(y) - fd_divergence(&d, y, 1e-6)).abs() < 1e-5, "{y}");
            checked += 1;
        }
        assert!(checked > 60);
    }

    #[test]
    fn rejects_bad_lambda() {
        assert!(Denoiser::soft_threshold(-0.1).is_err());
        assert!(Denoiser::soft_threshold(f64::NAN).is_err());
        assert!(Denoiser::soft_threshold(f64::INFINITY).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(validate_grid(&[]).is_err());
        assert!(validate_grid(&[0.0, 0.0]).is_err());
        assert!(validate_grid(&[1.0, 0.5]).is_err());
        assert!(validate_grid(&[-1.0]).is_err());
        assert!(validate_grid(&[0.0, 0.25, 3.0]).is_ok());
        let g = default_lambda_grid();
        assert_eq!(g.len(), 25);
        assert_eq!(g[12], 3.0);
        assert_eq!(g[24], 6.0);
    }

    #[test]
    fn argmin_prefers_first() {
        assert_eq!(argmin_first(&[3.0, 1.0, 1.0, 2.0]), Some(1));
        assert_eq!(argmin_first(&[]), None);
        assert_eq!(argmin_first(&[5.0]), Some(0));
    }
}
