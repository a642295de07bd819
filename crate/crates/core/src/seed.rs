//! Seed derivation for reproducible Monte Carlo runs.
//!
//! Every trial draws from its own generator whose seed is a function of the
//! master seed, the SNR grid index and the trial index only. Results therefore
//! do not depend on how trials are scheduled across workers.

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial_index` at grid point `grid_index`:
/// `splitmix64(splitmix64(splitmix64(master) ^ grid_index) ^ trial_index)`.
pub fn trial_seed(master: u64, grid_index: u64, trial_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ grid_index) ^ trial_index)
}

/// Independent sub-stream of a seed, e.g. for the noise draw of a snapshot whose
/// channel is drawn from `seed` itself.
pub fn substream(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream.wrapping_add(0xD1B5_4A32_D192_ED03)))
}
