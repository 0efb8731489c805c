//! Discrete Fourier analysis of daily series (sample rate 1/day).
//!
//! Forward transforms are unscaled, `X[k] = sum_n x[n] exp(-2 pi i n k / N)`;
//! the inverse carries the `1/N`.
//!
//! Sinusoidal decomposition uses `a[k] = 2|X[k]|/N` and `theta[k] = arg X[k]`
//! for `1 <= k < N/2`. The DC term and, for even `N`, the Nyquist term occur
//! once rather than as a conjugate pair, so they use `|X[k]|/N`; with those
//! two conventions [`reconstruct`] reproduces the series exactly at integer
//! times.

mod fft;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use fft::FftPlan;

use crate::error::{Error, Result};

/// Relative tolerance for the conjugate-symmetry check in [`idft`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Spectrum of a length-N series.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    bins: Vec<Complex64>,
}

impl Spectrum {
    pub fn from_bins(bins: Vec<Complex64>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::EmptySeries);
        }
        Ok(Self { bins })
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [Complex64] {
        &mut self.bins
    }

    pub fn n_points(&self) -> usize {
        self.bins.len()
    }

    /// Cycles per day.
    pub fn sample_rate(&self) -> f64 {
        1.0
    }

    /// Frequency of bin `k` in cycles/day.
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 / self.bins.len() as f64
    }

    /// Overwrites the upper half with conjugates of the lower half and drops
    /// the imaginary parts of the self-conjugate bins.
    pub fn symmetrize(&mut self) {
        let n = self.bins.len();
        self.bins[0].im = 0.0;
        for k in 1..n.div_ceil(2) {
            self.bins[n - k] = self.bins[k].conj();
        }
        if n.is_multiple_of(2) {
            self.bins[n / 2].im = 0.0;
        }
    }

    /// Largest `|X[k] - conj(X[N-k])|`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.bins.len();
        (0..n)
            .map(|k| (self.bins[k] - self.bins[(n - k) % n].conj()).norm())
            .fold(0.0, f64::max)
    }
}

pub fn dft(x: &[f64]) -> Result<Spectrum> {
    if x.is_empty() {
        return Err(Error::EmptySeries);
    }
    let input: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(Spectrum {
        bins: FftPlan::new(x.len()).forward(&input),
    })
}

/// Inverse transform of a spectrum that belongs to a real series. Fails when
/// the bins are not conjugate-symmetric to within
/// `SYMMETRY_TOLERANCE * max|X|`; otherwise the imaginary residue is dropped.
pub fn idft(spectrum: &Spectrum) -> Result<Vec<f64>> {
    let peak = spectrum.bins.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tolerance = SYMMETRY_TOLERANCE * peak;
    let residual = spectrum.symmetry_residual();
    if residual > tolerance {
        return Err(Error::AsymmetricSpectrum {
            residual,
            tolerance,
        });
    }
    Ok(FftPlan::new(spectrum.n_points())
        .inverse(&spectrum.bins)
        .into_iter()
        .map(|c| c.re)
        .collect())
}

/// Phase in `(-pi, pi]`, with zero bins assigned phase 0.
pub fn principal_phase(c: Complex64) -> f64 {
    if c.re == 0.0 && c.im == 0.0 {
        return 0.0;
    }
    let theta = c.im.atan2(c.re);
    if theta <= -PI {
        PI
    } else {
        theta
    }
}

/// One cosine term `amplitude * cos(2 pi t bin / n_points + phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    pub bin: usize,
    pub amplitude: f64,
    pub phase: f64,
}

/// A set of cosines sharing the fundamental `1 / n_points` cycles/day.
#[derive(Debug, Clone, PartialEq)]
pub struct SinusoidBank {
    n_points: usize,
    components: Vec<Sinusoid>,
}

impl SinusoidBank {
    pub fn new(n_points: usize, components: Vec<Sinusoid>) -> Self {
        Self {
            n_points,
            components,
        }
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn components(&self) -> &[Sinusoid] {
        &self.components
    }

    pub fn get(&self, bin: usize) -> Option<&Sinusoid> {
        self.components.iter().find(|c| c.bin == bin)
    }

    /// Radians per day of bin `k`.
    pub fn angular_rate(&self, bin: usize) -> f64 {
        2.0 * PI * bin as f64 / self.n_points as f64
    }

    /// Keeps only the given bins.
    pub fn select(&self, bins: &[usize]) -> Self {
        Self {
            n_points: self.n_points,
            components: self
                .components
                .iter()
                .filter(|c| bins.contains(&c.bin))
                .copied()
                .collect(),
        }
    }
}

/// Amplitudes and phases of every non-redundant bin.
pub fn magnitude_phase(spectrum: &Spectrum) -> SinusoidBank {
    let n = spectrum.n_points();
    let nf = n as f64;
    let components = (0..=n / 2)
        .map(|k| {
            let x = spectrum.bins[k];
            let paired = k != 0 && 2 * k != n;
            let scale = if paired { 2.0 / nf } else { 1.0 / nf };
            Sinusoid {
                bin: k,
                amplitude: scale * x.norm(),
                phase: principal_phase(x),
            }
        })
        .collect();
    SinusoidBank::new(n, components)
}

/// Evaluates the bank at (possibly fractional) time `t` in days.
pub fn reconstruct(bank: &SinusoidBank, t: f64) -> f64 {
    bank.components
        .iter()
        .map(|c| c.amplitude * (bank.angular_rate(c.bin) * t + c.phase).cos())
        .sum()
}

/// Symmetric Hann window, zero at both ends. A single point gets weight 1.
pub fn hann_window(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    let denom = (n - 1) as f64;
    (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / denom).cos()))
        .collect()
}
