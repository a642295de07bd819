//! Blind estimation of noise power, signal power, SNR and denoiser MSE from a
//! single multi-antenna snapshot.
//!
//! The estimators rely on the received vector being sparse after a unitary DFT
//! across the array (the beamspace). Sorting the beamspace powers separates a
//! small number of strong, signal-bearing beams from a flat noise floor, and the
//! mean of the floor is the noise power estimate. Signal power, SNR and a
//! Stein-type MSE estimate for shrinkage denoisers are derived from it.
//!
//! Module map:
//!
//! - [`beamspace`]: complex vectors, the unitary beamspace transform, sorted power.
//! - [`channel`]: uniform linear array channel and snapshot generator.
//! - [`estimators`]: noise power, signal power, SNR and blind MSE estimators.
//! - [`denoise`]: soft-threshold denoiser, its divergence and threshold selection.
//! - [`harness`]: seeded Monte Carlo sweeps, checks, CSV and SVG output.

pub mod beamspace;
pub mod channel;
pub mod denoise;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod seed;

pub use beamspace::{from_beamspace, naive_dft, sorted_power, to_beamspace, BeamspacePower, ComplexVec};
pub use channel::{draw_channel, make_snapshot, steering_vector, ArrayGeometry, ChannelRealization, Path, Snapshot};
pub use denoise::{sweep_lambda, Denoiser, LambdaSweep};
pub use error::{Error, Result};
pub use estimators::{
    estimate_mse_blind, estimate_noise_power, estimate_signal_power, estimate_snr, sure_with_known_noise,
    BlindEstimate, MseEstimate, NoiseEstimate, SnrOutcome,
};

pub use num_complex::Complex64;
