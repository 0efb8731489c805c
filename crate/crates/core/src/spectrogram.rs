//! Normalized magnitude spectra of series derivatives.
//!
//! Each window is differentiated on its own (circular frequency-domain
//! derivative), multiplied by a Hann window and transformed. Magnitudes of
//! bins `0..=N/2` are divided by the largest magnitude in a normalization band
//! and clipped to `[0, 1]`.

use chrono::NaiveDate;

use crate::derivative::frequency_domain_derivative;
use crate::error::{Error, Result};
use crate::series::DailySeries;
use crate::spectral::{dft, hann_window};

pub const SPECTRUM_WINDOW_DAYS: usize = 193;
pub const SPECTRUM_BAND: (f64, f64) = (0.1, 0.475);
pub const SLIDING_WINDOW_DAYS: usize = 25;
pub const SLIDING_FLOOR: f64 = 0.1;

/// Band maxima at or below this fraction of the window's absolute sum count
/// as zero.
const ZERO_BAND_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrogramFrame {
    pub window_start: NaiveDate,
    pub frequencies: Vec<f64>,
    pub normalized_magnitude: Vec<f64>,
    /// The normalization band held no energy, so the magnitudes are raw
    /// (clipped) rather than normalized.
    pub zero_band: bool,
}

impl SpectrogramFrame {
    /// Index of the largest value among bins satisfying `keep`.
    pub fn peak_bin(&self, keep: impl Fn(f64) -> bool) -> Option<usize> {
        (0..self.frequencies.len())
            .filter(|&k| keep(self.frequencies[k]))
            .max_by(|&a, &b| self.normalized_magnitude[a].total_cmp(&self.normalized_magnitude[b]))
    }
}

fn derivative_magnitudes(segment: &[f64]) -> Result<Vec<f64>> {
    let slope = frequency_domain_derivative(segment)?;
    let windowed: Vec<f64> = slope
        .iter()
        .zip(hann_window(segment.len()))
        .map(|(v, w)| v * w)
        .collect();
    let spectrum = dft(&windowed)?;
    Ok(spectrum.bins()[..=segment.len() / 2]
        .iter()
        .map(|c| c.norm())
        .collect())
}

fn frame(
    start: NaiveDate,
    segment: &[f64],
    in_band: impl Fn(f64) -> bool,
) -> Result<SpectrogramFrame> {
    let n = segment.len();
    let frequencies: Vec<f64> = (0..=n / 2).map(|k| k as f64 / n as f64).collect();
    let mut mags = derivative_magnitudes(segment)?;
    let band_max = frequencies
        .iter()
        .zip(&mags)
        .filter(|(f, _)| in_band(**f))
        .map(|(_, m)| *m)
        .fold(0.0, f64::max);
    let scale: f64 = segment.iter().map(|v| v.abs()).sum();
    let zero_band = band_max <= ZERO_BAND_RATIO * scale;
    for m in &mut mags {
        if !zero_band {
            *m /= band_max;
        }
        *m = m.clamp(0.0, 1.0);
    }
    Ok(SpectrogramFrame {
        window_start: start,
        frequencies,
        normalized_magnitude: mags,
        zero_band,
    })
}

fn check_window(series: &DailySeries, window_days: usize) -> Result<()> {
    if window_days < 2 {
        return Err(Error::InvalidArgument(format!(
            "window of {window_days} days is too short"
        )));
    }
    if series.len() < window_days {
        return Err(Error::TooShort {
            what: "spectrum window",
            needed: window_days,
            got: series.len(),
        });
    }
    Ok(())
}

/// Spectrum of the most recent `window_days` points, normalized over the
/// closed band `[band.0, band.1]`.
pub fn windowed_derivative_spectrum(
    series: &DailySeries,
    window_days: usize,
    band: (f64, f64),
) -> Result<SpectrogramFrame> {
    check_window(series, window_days)?;
    if !(band.0 <= band.1) {
        return Err(Error::InvalidArgument(format!(
            "normalization band [{}, {}] is inverted",
            band.0, band.1
        )));
    }
    let w = series.tail(window_days)?;
    frame(w.start_date(), w.values(), |f| band.0 <= f && f <= band.1)
}

/// One frame per window position, each normalized to its own maximum above
/// `floor_freq`.
pub fn sliding_spectrogram(
    series: &DailySeries,
    window_days: usize,
    hop_days: usize,
    floor_freq: f64,
) -> Result<Vec<SpectrogramFrame>> {
    check_window(series, window_days)?;
    if hop_days == 0 {
        return Err(Error::InvalidArgument(
            "hop must be at least one day".into(),
        ));
    }
    let x = series.values();
    (0..=x.len() - window_days)
        .step_by(hop_days)
        .map(|start| {
            frame(series.date_at(start), &x[start..start + window_days], |f| {
                f > floor_freq
            })
        })
        .collect()
}
