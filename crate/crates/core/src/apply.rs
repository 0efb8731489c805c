//! Filtering of padded sequences.

use std::fmt;
use std::str::FromStr;

use crate::design::{
    squared_magnitude_spectrum, Biquad, DigitalFilter, FirFilter, Preset, SosFilter,
};
use crate::error::{Error, Result};
use crate::preprocess::pad;
use crate::series::DailySeries;
use crate::spectral::{dft, idft};

/// Time-centered convolution. `pad_len` is the number of synthetic samples at
/// each end of `x` and must cover the filter half-width; outputs inside the
/// pads see zeros past the ends and are meant to be discarded.
pub fn apply_fir_centered(filter: &FirFilter, x: &[f64], pad_len: usize) -> Result<Vec<f64>> {
    let half = filter.half_width();
    if pad_len < half {
        return Err(Error::TooShort {
            what: "padding for the centered filter",
            needed: half,
            got: pad_len,
        });
    }
    if x.len() < 2 * pad_len {
        return Err(Error::LengthMismatch {
            expected: 2 * pad_len,
            got: x.len(),
        });
    }
    let h = filter.coefficients();
    let n = x.len() as isize;
    Ok((0..n)
        .map(|i| {
            h.iter()
                .enumerate()
                .filter_map(|(j, &c)| {
                    let idx = i + half as isize - j as isize;
                    (0..n).contains(&idx).then(|| c * x[idx as usize])
                })
                .sum()
        })
        .collect())
}

/// Starting state of each recursive pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    /// All delay elements zero.
    Zero,
    /// Delay elements hold the steady state for a constant input equal to
    /// the first sample of the pass.
    #[default]
    SteadyState,
}

/// Transposed direct form II. `level` is the constant input the state is
/// settled to before the first sample.
fn run_section(s: &Biquad, x: &mut [f64], level: f64) {
    let [b0, b1, b2] = s.b;
    let [a1, a2] = s.a;
    let out = level * (b0 + b1 + b2) / (1.0 + a1 + a2);
    let (mut z1, mut z2) = (out - b0 * level, b2 * level - a2 * out);
    for v in x.iter_mut() {
        let input = *v;
        let y = b0 * input + z1;
        z1 = b1 * input - a1 * y + z2;
        z2 = b2 * input - a2 * y;
        *v = y;
    }
}

/// Causal single pass of the cascade.
pub fn filter_causal(filter: &SosFilter, x: &[f64], init: InitialState) -> Vec<f64> {
    let mut y: Vec<f64> = x.iter().map(|v| v * filter.gain()).collect();
    let mut level = match init {
        InitialState::Zero => 0.0,
        InitialState::SteadyState => y.first().copied().unwrap_or(0.0),
    };
    for s in filter.sections() {
        run_section(s, &mut y, level);
        level *= (s.b.iter().sum::<f64>()) / (1.0 + s.a[0] + s.a[1]);
    }
    y
}

/// Reverse, filter, reverse, filter. The composite has magnitude `|H|^2`
/// and zero phase.
pub fn apply_zero_phase(filter: &DigitalFilter, x: &[f64], init: InitialState) -> Result<Vec<f64>> {
    let DigitalFilter::Iir(sos) = filter else {
        return Err(Error::WrongFilterKind { expected: "iir" });
    };
    sos.check_stable()?;
    let mut rev: Vec<f64> = x.iter().rev().copied().collect();
    rev = filter_causal(sos, &rev, init);
    rev.reverse();
    Ok(filter_causal(sos, &rev, init))
}

/// Multiplies the DFT of `x` by a real, even spectrum `hs` and transforms back.
pub fn apply_spectrum(hs: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if hs.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: hs.len(),
        });
    }
    let mut spectrum = dft(x)?;
    for (bin, &h) in spectrum.bins_mut().iter_mut().zip(hs) {
        *bin *= h;
    }
    idft(&spectrum)
}

/// Frequency-domain filtering with the sampled squared magnitude of `filter`.
pub fn apply_frequency_domain(filter: &DigitalFilter, x: &[f64]) -> Result<Vec<f64>> {
    let hs = squared_magnitude_spectrum(filter, x.len())?;
    apply_spectrum(&hs, x)
}

/// Ideal band mask on DFT bins, mirrored about Nyquist.
pub fn brick_wall_spectrum(n: usize, f_low: f64, f_high: f64) -> Result<Vec<f64>> {
    if !(0.0 <= f_low && f_low < f_high && f_high <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "band [{f_low}, {f_high}] must satisfy 0 <= low < high <= 0.5"
        )));
    }
    let nf = n as f64;
    let in_band = |k: usize| {
        let k = k as f64;
        nf * f_low <= k && k <= nf * f_high
    };
    Ok((0..n)
        .map(|k| {
            let mirrored = k > 0 && in_band(n - k);
            if in_band(k) || mirrored {
                1.0
            } else {
                0.0
            }
        })
        .collect())
}

/// Filtering strategy of a smoothing pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MovingAverage,
    ZeroPhase,
    FrequencyDomain,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::FrequencyDomain,
        Method::ZeroPhase,
        Method::MovingAverage,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::FrequencyDomain => "fd",
            Method::ZeroPhase => "iir",
            Method::MovingAverage => "ma",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|m| m.name() == wanted)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("unknown method '{s}'; valid methods: fd, iir, ma"))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub pad_len: usize,
    /// Replace the sampled filter spectrum with the ideal band mask of the
    /// preset pass band. Frequency-domain method only.
    pub brick_wall: bool,
    pub init: InitialState,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            pad_len: crate::preprocess::DEFAULT_PAD_DAYS,
            brick_wall: false,
            init: InitialState::default(),
        }
    }
}

/// Pad, filter and unpad. The result has the dates and label of `series`.
pub fn pipeline(
    series: &DailySeries,
    preset: Preset,
    method: Method,
    opts: PipelineOptions,
) -> Result<DailySeries> {
    if opts.brick_wall && method != Method::FrequencyDomain {
        return Err(Error::InvalidArgument(
            "the brick-wall mask applies to the frequency-domain method only".into(),
        ));
    }
    let padded = pad(series, opts.pad_len)?;
    let x = padded.values();
    let y = match method {
        Method::FrequencyDomain if opts.brick_wall => {
            let (lo, hi) = preset.passband();
            apply_spectrum(&brick_wall_spectrum(x.len(), lo, hi)?, x)?
        }
        Method::FrequencyDomain => apply_frequency_domain(&preset.build()?, x)?,
        Method::ZeroPhase => apply_zero_phase(&preset.build()?, x, opts.init)?,
        Method::MovingAverage => match preset.build()? {
            DigitalFilter::Fir(fir) => apply_fir_centered(&fir, x, opts.pad_len)?,
            DigitalFilter::Iir(_) => return Err(Error::WrongFilterKind { expected: "fir" }),
        },
    };
    padded.unpad(&y)
}
