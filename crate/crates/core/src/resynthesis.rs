//! Resynthesis of the weekly oscillations from the derivative spectrum.
//!
//! The most recent `N` days are differentiated in the frequency domain and
//! decomposed into cosines. The bins nearest the requested periods are kept
//! and integrated analytically: a derivative term `a cos(2 pi n k / N + theta)`
//! integrates to `(a N / (2 pi k)) sin(2 pi n k / N + theta)`. The integration
//! constant is zero.
//!
//! Sample `n` of the window is the datum of day `n`, placed at 12:00 of that
//! day, so an instant `t` days after midnight of the first window day maps to
//! `n = t - 0.5`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use chrono::{Duration, NaiveDateTime, NaiveTime};

use crate::derivative::frequency_domain_derivative;
use crate::error::{Error, Result};
use crate::format::fmt_g9;
use crate::series::DailySeries;
use crate::spectral::{dft, magnitude_phase, Sinusoid};

pub const DEFAULT_WINDOW_DAYS: usize = 183;
pub const DEFAULT_PERIODS: [f64; 3] = [7.0, 3.5, 7.0 / 3.0];
pub const MINUTES_PER_DAY: u32 = 1440;

/// Periods within this many days of 7/3 are read as exactly 7/3.
const THIRD_HARMONIC_SNAP: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResynthOptions {
    pub window_days: usize,
    pub step_minutes: u32,
    /// Extra bins kept on each side of every selected bin.
    pub bin_width: usize,
}

impl Default for ResynthOptions {
    fn default() -> Self {
        Self {
            window_days: DEFAULT_WINDOW_DAYS,
            step_minutes: 1,
            bin_width: 0,
        }
    }
}

/// Continuous oscillation sampled on a minute grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResynthWaveform {
    start_instant: NaiveDateTime,
    step_minutes: u32,
    n_points: usize,
    components: Vec<Sinusoid>,
    samples: Vec<f64>,
}

impl ResynthWaveform {
    /// Midnight at the start of the first window day.
    pub fn start_instant(&self) -> NaiveDateTime {
        self.start_instant
    }

    pub fn step_minutes(&self) -> u32 {
        self.step_minutes
    }

    /// Window length `N` in days.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// Integrated components in cosine form: `amplitude * cos(2 pi n bin / N + phase)`.
    pub fn components(&self) -> &[Sinusoid] {
        &self.components
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn instant(&self, index: usize) -> NaiveDateTime {
        self.start_instant + Duration::minutes(index as i64 * i64::from(self.step_minutes))
    }

    /// Value at `t` days after [`ResynthWaveform::start_instant`].
    pub fn value_at(&self, t: f64) -> f64 {
        let n = t - 0.5;
        let nf = self.n_points as f64;
        self.components
            .iter()
            .map(|c| c.amplitude * (2.0 * PI * c.bin as f64 * n / nf + c.phase).cos())
            .sum()
    }
}

fn normalize_period(p: f64) -> Result<f64> {
    if !(p.is_finite() && p >= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "period {p} must be a finite number of days >= 2"
        )));
    }
    Ok(if (p - 7.0 / 3.0).abs() < THIRD_HARMONIC_SNAP {
        7.0 / 3.0
    } else {
        p
    })
}

/// Bins kept for the requested periods. Bins are restricted to
/// `1 <= k < N/2`; two periods claiming one bin is an error.
pub fn select_bins(n: usize, periods: &[f64], bin_width: usize) -> Result<Vec<usize>> {
    let mut owner: Vec<(usize, f64)> = Vec::new();
    for &raw in periods {
        let period = normalize_period(raw)?;
        let centre = (n as f64 / period).round() as usize;
        let lo = centre.saturating_sub(bin_width).max(1);
        let hi = centre + bin_width;
        for k in lo..=hi {
            if 2 * k >= n {
                continue;
            }
            if let Some(&(_, first)) = owner.iter().find(|(b, _)| *b == k) {
                return Err(Error::BinCollision {
                    first,
                    second: raw,
                    bin: k,
                });
            }
            owner.push((k, raw));
        }
        if !owner.iter().any(|&(_, p)| p == raw) {
            return Err(Error::InvalidArgument(format!(
                "period {raw} maps to no bin below Nyquist for a {n}-day window"
            )));
        }
    }
    let mut bins: Vec<usize> = owner.into_iter().map(|(k, _)| k).collect();
    bins.sort_unstable();
    Ok(bins)
}

pub fn resynthesize(
    series: &DailySeries,
    periods: &[f64],
    opts: ResynthOptions,
) -> Result<ResynthWaveform> {
    let n = opts.window_days;
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "window of {n} days is too short"
        )));
    }
    if series.len() < n {
        return Err(Error::TooShort {
            what: "resynthesis window",
            needed: n,
            got: series.len(),
        });
    }
    if opts.step_minutes == 0 || !MINUTES_PER_DAY.is_multiple_of(opts.step_minutes) {
        return Err(Error::InvalidArgument(format!(
            "step of {} minutes must divide 1440",
            opts.step_minutes
        )));
    }
    let bins = select_bins(n, periods, opts.bin_width)?;
    let window = series.tail(n)?;
    let slope = frequency_domain_derivative(window.values())?;
    let bank = magnitude_phase(&dft(&slope)?);
    let components: Vec<Sinusoid> = bins
        .iter()
        .map(|&k| {
            let c = bank.get(k).expect("bin below Nyquist");
            // sin(x) = cos(x - pi/2)
            Sinusoid {
                bin: k,
                amplitude: c.amplitude * n as f64 / (2.0 * PI * k as f64),
                phase: c.phase - PI / 2.0,
            }
        })
        .collect();

    let start_instant = window.start_date().and_time(NaiveTime::MIN);
    let per_day = (MINUTES_PER_DAY / opts.step_minutes) as usize;
    let mut wave = ResynthWaveform {
        start_instant,
        step_minutes: opts.step_minutes,
        n_points: n,
        components,
        samples: Vec::new(),
    };
    let dt = f64::from(opts.step_minutes) / f64::from(MINUTES_PER_DAY);
    wave.samples = (0..n * per_day)
        .map(|i| wave.value_at(i as f64 * dt))
        .collect();
    Ok(wave)
}

/// Long CSV with a minute-resolution ISO timestamp per sample.
pub fn export_waveform(w: &ResynthWaveform) -> String {
    let mut out = String::from("timestamp,value\n");
    for (i, v) in w.samples.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{}",
            w.instant(i).format("%Y-%m-%dT%H:%M"),
            fmt_g9(*v)
        );
    }
    out
}
