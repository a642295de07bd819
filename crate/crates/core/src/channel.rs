//! Geometric multipath channel over a uniform linear array and the noisy
//! snapshot generator built on it.
//!
//! The channel is a sum of `L` plane waves, `h = Σ_ℓ g_ℓ a(φ_ℓ)`, with gains
//! drawn circularly-symmetric complex Gaussian and spatial frequencies uniform on
//! `[-1, 1]`. Spatial frequencies are continuous, so paths generally fall between
//! DFT beams and leak into their neighbours.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::beamspace::ComplexVec;
use crate::error::{Error, Result};
use crate::seed::substream;

const NOISE_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    antennas: usize,
    /// Element spacing in wavelengths.
    spacing: f64,
}

impl ArrayGeometry {
    /// Half-wavelength ULA with `antennas` elements.
    pub fn ula(antennas: usize) -> Result<Self> {
        Self::new(antennas, 0.5)
    }

    pub fn new(antennas: usize, spacing: f64) -> Result<Self> {
        if antennas < 1 {
            return Err(Error::invalid("antennas", antennas, "must be at least 1"));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::invalid("spacing", spacing, "must be positive and finite"));
        }
        Ok(ArrayGeometry { antennas, spacing })
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }
}

/// Array response `a(φ)[m] = exp(j 2π · spacing · m · φ)`.
pub fn steering_vector(geometry: &ArrayGeometry, phi: f64) -> Result<ComplexVec> {
    if !(-1.0..=1.0).contains(&phi) {
        return Err(Error::invalid("phi", phi, "spatial frequency must lie in [-1, 1]"));
    }
    let step = 2.0 * PI * geometry.spacing * phi;
    Ok(ComplexVec::from_vec_unchecked(
        (0..geometry.antennas).map(|m| Complex64::from_polar(1.0, step * m as f64)).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub gain: Complex64,
    pub spatial_frequency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: ComplexVec,
    paths: Vec<Path>,
}

impl ChannelRealization {
    /// Assembles `h` from explicit paths.
    pub fn from_paths(geometry: &ArrayGeometry, paths: Vec<Path>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::invalid("paths", 0, "need at least one propagation path"));
        }
        let mut h = vec![Complex64::new(0.0, 0.0); geometry.antennas];
        for path in &paths {
            if !(path.gain.re.is_finite() && path.gain.im.is_finite()) {
                return Err(Error::invalid("gain", path.gain, "must be finite"));
            }
            let a = steering_vector(geometry, path.spatial_frequency)?;
            h.iter_mut().zip(a.iter()).for_each(|(hm, am)| *hm += path.gain * am);
        }
        Ok(ChannelRealization { h: ComplexVec::new(h)?, paths })
    }

    pub fn h(&self) -> &ComplexVec {
        &self.h
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn path_count(&self) -> usize {
        self.paths.len()
    }
}

/// Circularly-symmetric complex Gaussian sample with the given variance.
pub(crate) fn complex_gaussian<R: Rng>(rng: &mut R, variance: f64) -> Complex64 {
    let sigma = (variance).sqrt() * FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sigma * re, sigma * im)
}

/// Random `paths`-path channel; deterministic in `seed`.
pub fn draw_channel(geometry: &ArrayGeometry, paths: usize, seed: u64) -> Result<ChannelRealization> {
    if paths < 1 {
        return Err(Error::invalid("paths", paths, "need at least one propagation path"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let paths = (0..paths)
        .map(|_| {
            let gain = complex_gaussian(&mut rng, 1.0);
            let spatial_frequency = rng.random_range(-1.0..=1.0);
            Path { gain, spatial_frequency }
        })
        .collect();
    ChannelRealization::from_paths(geometry, paths)
}

/// One received vector with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub y: ComplexVec,
    pub x: ComplexVec,
    pub n0_true: f64,
    pub rho_true: f64,
    pub seed: u64,
}

impl Snapshot {
    pub fn antennas(&self) -> usize {
        self.y.len()
    }

    /// `y − x`.
    pub fn noise(&self) -> ComplexVec {
        ComplexVec::from_vec_unchecked(self.y.iter().zip(self.x.iter()).map(|(y, x)| y - x).collect())
    }
}

/// i.i.d. `CN(0, n0)` noise vector.
pub fn draw_noise(len: usize, n0: f64, seed: u64) -> Result<ComplexVec> {
    if !(n0.is_finite() && n0 > 0.0) {
        return Err(Error::invalid("n0", n0, "noise power must be positive and finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexVec::new((0..len).map(|_| complex_gaussian(&mut rng, n0)).collect())
}

/// Scales `signal` so that `‖x‖² = M · rho · n0`. Returns zeros when `rho = 0`.
pub fn calibrate_signal(signal: &ComplexVec, rho: f64, n0: f64) -> Result<ComplexVec> {
    validate_rho_n0(rho, n0)?;
    if rho == 0.0 {
        return ComplexVec::zeros(signal.len());
    }
    let energy = signal.norm_sqr();
    if energy == 0.0 {
        return Err(Error::invalid("signal", "zero vector", "cannot be scaled to a positive SNR"));
    }
    let target = signal.len() as f64 * rho * n0;
    signal.scaled((target / energy).sqrt())
}

fn validate_rho_n0(rho: f64, n0: f64) -> Result<()> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(Error::invalid("rho", rho, "SNR must be nonnegative and finite"));
    }
    if !(n0.is_finite() && n0 > 0.0) {
        return Err(Error::invalid("n0", n0, "noise power must be positive and finite"));
    }
    Ok(())
}

/// Adds fresh noise to a fixed noiseless signal. `rho_true` is the realized
/// `‖x‖² / (M n0)`.
pub fn observe(x: &ComplexVec, n0: f64, seed: u64) -> Result<Snapshot> {
    let noise = draw_noise(x.len(), n0, seed)?;
    let y = x.add(&noise)?;
    let rho_true = x.norm_sqr() / (x.len() as f64 * n0);
    Ok(Snapshot { y, x: x.clone(), n0_true: n0, rho_true, seed })
}

/// Channel draw plus noise at an exact per-snapshot SNR.
///
/// The transmit symbol is `s = 1`, so `x` is the channel rescaled to
/// `‖x‖² = M · rho_target · n0`. The channel uses `seed` and the noise an
/// independent sub-stream of it.
pub fn make_snapshot(geometry: &ArrayGeometry, paths: usize, rho_target: f64, n0: f64, seed: u64) -> Result<Snapshot> {
    validate_rho_n0(rho_target, n0)?;
    let channel = draw_channel(geometry, paths, seed)?;
    let x = calibrate_signal(channel.h(), rho_target, n0)?;
    let mut snapshot = observe(&x, n0, substream(seed, NOISE_STREAM))?;
    snapshot.rho_true = rho_target;
    snapshot.seed = seed;
    Ok(snapshot)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steering_boresight_is_ones() {
        let g = ArrayGeometry::ula(8).unwrap();
        let a = steering_vector(&g, 0.0).unwrap();
        assert!(a.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn steering_endfire_alternates() {
        let g = ArrayGeometry::ula(2).unwrap();
        let a = steering_vector(&g, 1.0).unwrap();
        assert!((a[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((a[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn steering_has_norm_m() {
        let g = ArrayGeometry::ula(64).unwrap();
        for phi in [-1.0, -0.37, 0.0, 0.51, 1.0] {
            let a = steering_vector(&g, phi).unwrap();
            assert!((a.norm_sqr() - 64.0).abs() < 1e-12);
        }
    }

    #[test]
    fn steering_rejects_out_of_range() {
        let g = ArrayGeometry::ula(4).unwrap();
        assert!(steering_vector(&g, 1.01).is_err());
        assert!(steering_vector(&g, f64::NAN).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(ArrayGeometry::new(0, 0.5).is_err());
        assert!(ArrayGeometry::new(4, 0.0).is_err());
        assert!(ArrayGeometry::new(4, -1.0).is_err());
        assert_eq!(ArrayGeometry::ula(64).unwrap().spacing(), 0.5);
    }

    #[test]
    fn single_boresight_path_gives_ones() {
        let g = ArrayGeometry::ula(16).unwrap();
        let ch =
            ChannelRealization::from_paths(&g, vec![Path { gain: Complex64::new(1.0, 0.0), spatial_frequency: 0.0 }])
                .unwrap();
        assert!(ch.h().iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn channel_matches_its_paths() {
        let g = ArrayGeometry::ula(32).unwrap();
        let ch = draw_channel(&g, 4, 11).unwrap();
        assert_eq!(ch.path_count(), 4);
        for m in 0..32 {
            let expected: Complex64 = ch
                .paths()
                .iter()
                .map(|p| p.gain * Complex64::from_polar(1.0, PI * m as f64 * p.spatial_frequency))
                .sum();
            assert!((ch.h()[m] - expected).norm() < 1e-12);
        }
        assert!(ch.paths().iter().all(|p| (-1.0..=1.0).contains(&p.spatial_frequency)));
    }

    #[test]
    fn channel_is_deterministic() {
        let g = ArrayGeometry::ula(64).unwrap();
        assert_eq!(draw_channel(&g, 3, 5).unwrap(), draw_channel(&g, 3, 5).unwrap());
        assert_ne!(draw_channel(&g, 3, 5).unwrap(), draw_channel(&g, 3, 6).unwrap());
    }

    #[test]
    fn zero_paths_rejected() {
        let g = ArrayGeometry::ula(8).unwrap();
        assert!(draw_channel(&g, 0, 1).is_err());
        assert!(ChannelRealization::from_paths(&g, vec![]).is_err());
    }

    #[test]
    fn zero_snr_is_pure_noise() {
        let g = ArrayGeometry::ula(64).unwrap();
        let s = make_snapshot(&g, 3, 0.0, 1.0, 9).unwrap();
        assert_eq!(s.x.norm_sqr(), 0.0);
        assert_eq!(s.y, s.noise());
        assert_eq!(s.rho_true, 0.0);
    }

    #[test]
    fn calibration_is_exact() {
        let g = ArrayGeometry::ula(64).unwrap();
        let s = make_snapshot(&g, 3, 1.0, 1.0, 3).unwrap();
        assert!((s.x.norm_sqr() - 64.0).abs() < 64.0 * 1e-12);
        for (seed, rho, n0) in [(1, 0.1, 1.0), (2, 100.0, 0.5), (3, 3.7, 2.0)] {
            let s = make_snapshot(&g, 3, rho, n0, seed).unwrap();
            let realized = s.x.norm_sqr() / (64.0 * n0);
            assert!((realized - rho).abs() <= 1e-12 * rho);
            assert_eq!(s.rho_true, rho);
        }
    }

    #[test]
    fn snapshot_validation() {
        let g = ArrayGeometry::ula(8).unwrap();
        assert!(make_snapshot(&g, 3, -1.0, 1.0, 0).is_err());
        assert!(make_snapshot(&g, 3, 1.0, 0.0, 0).is_err());
        assert!(make_snapshot(&g, 3, f64::NAN, 1.0, 0).is_err());
    }

    #[test]
    fn observe_keeps_signal() {
        let x = ComplexVec::from_pairs(&[(1.0, 0.0), (0.0, 2.0)]).unwrap();
        let s = observe(&x, 1.0, 4).unwrap();
        assert_eq!(s.x, x);
        assert!((s.rho_true - 2.5).abs() < 1e-15);
    }
}
