//! Complex vectors, the unitary antenna-to-beamspace transform and sorted
//! power sequences.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::ops::{Deref, Index};

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::error::{Error, Result};

/// A nonempty vector of finite complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVec(Vec<Complex64>);

impl ComplexVec {
    /// Validates length and finiteness.
    pub fn new(elements: Vec<Complex64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        if let Some(index) = elements.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(ComplexVec(elements))
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); len])
    }

    /// Builds from interleaved `(re, im)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    pub(crate) fn from_vec_unchecked(elements: Vec<Complex64>) -> Self {
        debug_assert!(!elements.is_empty());
        ComplexVec(elements)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    /// Squared Euclidean norm.
    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Element-wise powers `|z_m|^2`.
    pub fn powers(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm_sqr()).collect()
    }

    /// Multiplies every element by a real factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|z| z * factor).collect())
    }

    /// `‖self − other‖²`.
    pub fn distance_sqr(&self, other: &ComplexVec) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm_sqr()).sum())
    }

    /// Element-wise sum, e.g. signal plus noise.
    pub fn add(&self, other: &ComplexVec) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: other.len() });
        }
        Self::new(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Deref for ComplexVec {
    type Target = [Complex64];

    fn deref(&self) -> &[Complex64] {
        &self.0
    }
}

impl Index<usize> for ComplexVec {
    type Output = Complex64;

    fn index(&self, index: usize) -> &Complex64 {
        &self.0[index]
    }
}

impl TryFrom<Vec<Complex64>> for ComplexVec {
    type Error = Error;

    fn try_from(elements: Vec<Complex64>) -> Result<Self> {
        Self::new(elements)
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn unitary_fft(y: &ComplexVec, direction: FftDirection) -> ComplexVec {
    let len = y.len();
    let mut buffer = y.0.clone();
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction));
    fft.process(&mut buffer);
    let scale = 1.0 / (len as f64).sqrt();
    buffer.iter_mut().for_each(|z| *z *= scale);
    ComplexVec(buffer)
}

/// Unitary DFT across the array, `y_b[k] = M^{-1/2} Σ_m y[m] e^{-j2πkm/M}`.
///
/// Any length is accepted; the planner picks radix-2, mixed-radix or Bluestein
/// as appropriate. `‖y_b‖ = ‖y‖`.
pub fn to_beamspace(y: &ComplexVec) -> ComplexVec {
    unitary_fft(y, FftDirection::Forward)
}

/// Inverse of [`to_beamspace`].
pub fn from_beamspace(y_b: &ComplexVec) -> ComplexVec {
    unitary_fft(y_b, FftDirection::Inverse)
}

/// Direct O(M²) evaluation of the same unitary DFT as [`to_beamspace`].
///
/// Kept as an oracle for the fast path.
pub fn naive_dft(y: &ComplexVec) -> ComplexVec {
    let len = y.len();
    let scale = 1.0 / (len as f64).sqrt();
    let out = (0..len)
        .map(|k| {
            let acc: Complex64 = y
                .iter()
                .enumerate()
                .map(|(m, &v)| {
                    // reduce k·m mod M first so the phase stays accurate for large M
                    let phase = -2.0 * PI * ((k * m) % len) as f64 / len as f64;
                    v * Complex64::from_polar(1.0, phase)
                })
                .sum();
            acc * scale
        })
        .collect();
    ComplexVec(out)
}

/// Element-wise beamspace power sorted in ascending order, with the beam index
/// each sorted entry came from.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamspacePower {
    sorted: Vec<f64>,
    permutation: Vec<usize>,
}

impl BeamspacePower {
    /// Sorts raw powers. Fails on negative or non-finite entries.
    pub fn from_powers(powers: &[f64]) -> Result<Self> {
        if powers.is_empty() {
            return Err(Error::TooShort { len: 0, min: 1 });
        }
        if let Some(index) = powers.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if let Some(p) = powers.iter().find(|&&p| p < 0.0) {
            return Err(Error::invalid("power", p, "must be nonnegative"));
        }
        Ok(Self::sort(powers))
    }

    fn sort(powers: &[f64]) -> Self {
        let mut permutation: Vec<usize> = (0..powers.len()).collect();
        // ties broken by beam index, which the stable sort preserves
        permutation.sort_by(|&a, &b| powers[a].partial_cmp(&powers[b]).unwrap_or(Ordering::Equal));
        let sorted = permutation.iter().map(|&i| powers[i]).collect();
        BeamspacePower { sorted, permutation }
    }

    /// Powers in nondecreasing order.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `permutation()[i]` is the beam whose power is `sorted()[i]`.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.sorted.iter().sum()
    }
}

/// `|y_b|²` sorted ascending.
pub fn sorted_power(y_b: &ComplexVec) -> BeamspacePower {
    BeamspacePower::sort(&y_b.powers())
}
