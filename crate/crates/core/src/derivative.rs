//! Numerical differentiation of daily series.
//!
//! Three schemes are provided: the backward first difference (half-sample
//! delay), the eight-point central difference (no delay, exact for
//! polynomials up to degree 8) and the frequency-domain derivative, which
//! multiplies each bin by `j 2 pi f` and is exact on bin frequencies.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::preprocess;
use crate::spectral::{dft, idft, principal_phase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivativeMethod {
    FirstDifference,
    CentralDifference8,
    FrequencyDomain,
}

impl DerivativeMethod {
    pub const ALL: [DerivativeMethod; 3] = [
        DerivativeMethod::FirstDifference,
        DerivativeMethod::CentralDifference8,
        DerivativeMethod::FrequencyDomain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DerivativeMethod::FirstDifference => "first",
            DerivativeMethod::CentralDifference8 => "central8",
            DerivativeMethod::FrequencyDomain => "spectral",
        }
    }

    /// Complex response at `f` cycles/day, `0 <= f <= 0.5`.
    pub fn response(self, f: f64) -> Result<Complex64> {
        if !(0.0..=0.5).contains(&f) {
            return Err(Error::InvalidArgument(format!(
                "frequency {f} outside [0, 0.5]"
            )));
        }
        let w = 2.0 * PI * f;
        Ok(match self {
            // 1 - exp(-jw)
            DerivativeMethod::FirstDifference => Complex64::new(1.0 - w.cos(), w.sin()),
            DerivativeMethod::CentralDifference8 => {
                let im: f64 = CENTRAL_8
                    .iter()
                    .enumerate()
                    .map(|(i, c)| 2.0 * c * (w * (i + 1) as f64).sin())
                    .sum();
                Complex64::new(0.0, im)
            }
            DerivativeMethod::FrequencyDomain => Complex64::new(0.0, w),
        })
    }

    /// Magnitude response on a grid of frequencies.
    pub fn spectral_response(self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter().map(|&f| Ok(self.response(f)?.norm())).collect()
    }

    /// Phase response on a grid. Points of zero magnitude report the
    /// `pi/2` limit shared by every differentiator.
    pub fn phase_response(self, grid: &[f64]) -> Result<Vec<f64>> {
        grid.iter()
            .map(|&f| {
                let h = self.response(f)?;
                Ok(if h.norm() == 0.0 {
                    PI / 2.0
                } else {
                    principal_phase(h)
                })
            })
            .collect()
    }
}

impl fmt::Display for DerivativeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DerivativeMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown derivative method '{s}'; valid methods: first, central8, spectral"
                ))
            })
    }
}

/// Weights of `x[n+m] - x[n-m]` for `m = 1..=4`.
pub const CENTRAL_8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// `x[n] - x[n-1]` for `n = 1..N-1`.
pub fn first_difference(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::TooShort {
            what: "first difference",
            needed: 2,
            got: x.len(),
        });
    }
    Ok(x.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Eight-point central difference over the valid interior `n = 4..N-5`.
pub fn central_difference_8(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 9 {
        return Err(Error::TooShort {
            what: "central difference",
            needed: 9,
            got: x.len(),
        });
    }
    Ok(x.windows(9)
        .map(|w| {
            CENTRAL_8
                .iter()
                .enumerate()
                .map(|(i, c)| c * (w[4 + i + 1] - w[4 - i - 1]))
                .sum()
        })
        .collect())
}

/// Full-length central difference, computed on a copy of `x` extended with
/// four weekday-extrapolated days at each end.
pub fn central_difference_8_padded(x: &[f64]) -> Result<Vec<f64>> {
    let padded = preprocess::pad_values(x, 4)?;
    central_difference_8(&padded)
}

/// Multiplier applied to bin `k` of an `n`-point spectrum. The even-length
/// Nyquist bin gets 0 so the result stays conjugate-symmetric.
pub fn frequency_domain_multiplier(k: usize, n: usize) -> Complex64 {
    let (k, nf) = (k as f64, n as f64);
    let cycles = if 2.0 * k < nf {
        k / nf
    } else if 2.0 * k == nf {
        return Complex64::new(0.0, 0.0);
    } else {
        k / nf - 1.0
    };
    Complex64::new(0.0, 2.0 * PI * cycles)
}

/// Circular derivative of `x` computed through the DFT.
pub fn frequency_domain_derivative(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::TooShort {
            what: "frequency-domain derivative",
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len();
    let mut spectrum = dft(x)?;
    for (k, bin) in spectrum.bins_mut().iter_mut().enumerate() {
        *bin *= frequency_domain_multiplier(k, n);
    }
    spectrum.symmetrize();
    idft(&spectrum)
}

/// Dispatches on `method`. Output lengths differ: `N-1`, `N-8` and `N`.
pub fn differentiate(method: DerivativeMethod, x: &[f64]) -> Result<Vec<f64>> {
    match method {
        DerivativeMethod::FirstDifference => first_difference(x),
        DerivativeMethod::CentralDifference8 => central_difference_8(x),
        DerivativeMethod::FrequencyDomain => frequency_domain_derivative(x),
    }
}
