//! Filter construction and characterization.
//!
//! Two families are supported: the time-centered moving average and
//! minimum-order elliptic IIR filters realized as second-order sections.
//! Frequencies are in cycles/day throughout, Nyquist at 0.5.

mod elliptic;
mod presets;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::principal_phase;

pub use elliptic::{
    design_elliptic, design_with_order, estimate_order, DESIGN_MARGIN_DB, MAX_ORDER,
    VERIFY_POINTS_PER_BAND,
};
pub use presets::Preset;

/// Magnitudes below this are reported at [`DB_FLOOR`].
pub const MAGNITUDE_FLOOR: f64 = 1e-15;
pub const DB_FLOOR: f64 = -300.0;

/// Band layout of a design, with edges in cycles/day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandEdges {
    LowPass { pass: f64, stop: f64 },
    HighPass { pass: f64, stop: f64 },
    BandPass { pass: [f64; 2], stop: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterDesignSpec {
    pub edges: BandEdges,
    pub passband_ripple_db: f64,
    pub stopband_attenuation_db: f64,
}

/// Extremes of a realized response over the design bands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemplateReport {
    pub passband_min_db: f64,
    pub passband_max_db: f64,
    pub stopband_max_db: f64,
}

impl TemplateReport {
    pub fn meets(&self, ripple_db: f64, attenuation_db: f64) -> bool {
        self.passband_min_db >= -ripple_db
            && self.passband_max_db <= 0.0
            && self.stopband_max_db <= -attenuation_db
    }
}

fn inclusive_grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let points = points.max(2);
    (0..points).map(move |i| {
        if i == points - 1 {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (points - 1) as f64
        }
    })
}

impl FilterDesignSpec {
    pub fn validate(&self) -> Result<()> {
        let in_range = |f: f64| f > 0.0 && f < 0.5;
        let ok_edges = match self.edges {
            BandEdges::LowPass { pass, stop } => in_range(pass) && in_range(stop) && pass < stop,
            BandEdges::HighPass { pass, stop } => in_range(pass) && in_range(stop) && stop < pass,
            BandEdges::BandPass { pass, stop } => {
                pass.iter().chain(&stop).all(|&f| in_range(f))
                    && stop[0] < pass[0]
                    && pass[0] < pass[1]
                    && pass[1] < stop[1]
            }
        };
        if !ok_edges {
            return Err(Error::InfeasibleSpec(format!(
                "band edges {:?} must lie in (0, 0.5) with stopbands strictly outside the passband",
                self.edges
            )));
        }
        if !(self.passband_ripple_db > 2.0 * DESIGN_MARGIN_DB)
            || !(self.stopband_attenuation_db > self.passband_ripple_db)
        {
            return Err(Error::InfeasibleSpec(format!(
                "need 0 < ripple ({} dB) < attenuation ({} dB)",
                self.passband_ripple_db, self.stopband_attenuation_db
            )));
        }
        Ok(())
    }

    /// Passband as `[low, high]` cycles/day.
    pub fn passband(&self) -> (f64, f64) {
        match self.edges {
            BandEdges::LowPass { pass, .. } => (0.0, pass),
            BandEdges::HighPass { pass, .. } => (pass, 0.5),
            BandEdges::BandPass { pass, .. } => (pass[0], pass[1]),
        }
    }

    /// Stopband intervals in cycles/day.
    pub fn stopbands(&self) -> Vec<(f64, f64)> {
        match self.edges {
            BandEdges::LowPass { stop, .. } => vec![(stop, 0.5)],
            BandEdges::HighPass { stop, .. } => vec![(0.0, stop)],
            BandEdges::BandPass { stop, .. } => vec![(0.0, stop[0]), (stop[1], 0.5)],
        }
    }

    /// Measures `passes` cascaded applications of `filter` on
    /// `points_per_band` uniformly spaced frequencies in every band, edges
    /// included.
    pub fn measure(
        &self,
        filter: &DigitalFilter,
        passes: u32,
        points_per_band: usize,
    ) -> TemplateReport {
        let db = |f: f64| passes as f64 * 20.0 * filter.response_at_frequency(f).norm().log10();
        let (lo, hi) = self.passband();
        let (mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for f in inclusive_grid(lo, hi, points_per_band) {
            let v = db(f);
            pmin = pmin.min(v);
            pmax = pmax.max(v);
        }
        let smax = self
            .stopbands()
            .into_iter()
            .flat_map(|(lo, hi)| inclusive_grid(lo, hi, points_per_band))
            .map(db)
            .fold(f64::NEG_INFINITY, f64::max);
        TemplateReport {
            passband_min_db: pmin,
            passband_max_db: pmax,
            stopband_max_db: smax,
        }
    }

    /// `None` when a single pass meets the template.
    pub fn template_violation(
        &self,
        filter: &SosFilter,
        points_per_band: usize,
    ) -> Option<TemplateReport> {
        let report = self.measure(&DigitalFilter::Iir(filter.clone()), 1, points_per_band);
        (!report.meets(self.passband_ripple_db, self.stopband_attenuation_db)).then_some(report)
    }
}

/// `(b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    pub fn new(b: [f64; 3], a: [f64; 2]) -> Self {
        Self { b, a }
    }

    pub fn identity() -> Self {
        Self::new([1.0, 0.0, 0.0], [0.0, 0.0])
    }

    pub fn response_at(&self, z: Complex64) -> Complex64 {
        let zi = z.inv();
        let num = self.b[0] + zi * (self.b[1] + zi * self.b[2]);
        let den = 1.0 + zi * (self.a[0] + zi * self.a[1]);
        num / den
    }

    pub(crate) fn scale_numerator(&mut self, g: f64) {
        for b in &mut self.b {
            *b *= g;
        }
    }

    /// Largest root magnitude of `z^2 + a1 z + a2`.
    pub fn pole_radius(&self) -> f64 {
        let [a1, a2] = self.a;
        let disc = a1 * a1 - 4.0 * a2;
        if disc >= 0.0 {
            let r = disc.sqrt();
            ((-a1 + r) / 2.0).abs().max(((-a1 - r) / 2.0).abs())
        } else {
            a2.sqrt()
        }
    }

    pub fn is_stable(&self) -> bool {
        self.pole_radius() < 1.0
    }
}

/// Cascade of second-order sections with an overall gain.
#[derive(Debug, Clone, PartialEq)]
pub struct SosFilter {
    sections: Vec<Biquad>,
    gain: f64,
}

impl SosFilter {
    pub fn new(sections: Vec<Biquad>, gain: f64) -> Self {
        Self { sections, gain }
    }

    pub fn identity() -> Self {
        Self::new(vec![Biquad::identity()], 1.0)
    }

    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub(crate) fn set_gain(&mut self, gain: f64) {
        self.gain = gain;
    }

    /// Number of poles.
    pub fn order(&self) -> usize {
        self.sections
            .iter()
            .map(|s| s.a.iter().rposition(|&a| a != 0.0).map_or(0, |i| i + 1))
            .sum()
    }

    pub fn response_at(&self, z: Complex64) -> Complex64 {
        self.sections
            .iter()
            .fold(Complex64::new(self.gain, 0.0), |acc, s| {
                acc * s.response_at(z)
            })
    }

    pub fn check_stable(&self) -> Result<()> {
        for (index, s) in self.sections.iter().enumerate() {
            if !s.is_stable() {
                return Err(Error::UnstableFilter {
                    index,
                    radius: s.pole_radius(),
                });
            }
        }
        Ok(())
    }
}

/// Time-centered FIR filter of odd length: output `n` looks `(len-1)/2`
/// samples both ways.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    coefficients: Vec<f64>,
}

impl FirFilter {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(
                "a time-centered FIR needs an odd number of taps".into(),
            ));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn half_width(&self) -> usize {
        self.coefficients.len() / 2
    }

    /// Applying `self` and then `other`.
    pub fn cascade(&self, other: &FirFilter) -> FirFilter {
        let mut out = vec![0.0; self.coefficients.len() + other.coefficients.len() - 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            for (j, b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        FirFilter { coefficients: out }
    }

    fn is_symmetric(&self) -> bool {
        let c = &self.coefficients;
        (0..c.len() / 2).all(|i| c[i] == c[c.len() - 1 - i])
    }

    /// `sum_k c[k] exp(-j w (k - h))`. Symmetric taps are summed as cosines so
    /// the result is exactly real.
    pub fn response_at_angle(&self, w: f64) -> Complex64 {
        let h = self.half_width();
        if self.is_symmetric() {
            let re = self.coefficients[h]
                + (1..=h)
                    .map(|m| 2.0 * self.coefficients[h + m] * (w * m as f64).cos())
                    .sum::<f64>();
            Complex64::new(re, 0.0)
        } else {
            self.coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| c * Complex64::from_polar(1.0, -w * (k as f64 - h as f64)))
                .sum()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Iir,
    Fir,
}

/// A realized filter.
#[derive(Debug, Clone, PartialEq)]
pub enum DigitalFilter {
    Iir(SosFilter),
    Fir(FirFilter),
}

impl DigitalFilter {
    pub fn kind(&self) -> FilterKind {
        match self {
            DigitalFilter::Iir(_) => FilterKind::Iir,
            DigitalFilter::Fir(_) => FilterKind::Fir,
        }
    }

    /// Response at `f` cycles/day. The FIR form is non-causal (time-centered).
    pub fn response_at_frequency(&self, f: f64) -> Complex64 {
        let w = 2.0 * PI * f;
        match self {
            DigitalFilter::Iir(s) => s.response_at(Complex64::from_polar(1.0, w)),
            DigitalFilter::Fir(fir) => fir.response_at_angle(w),
        }
    }
}

/// `window` equal taps of `1/window`, centered on the output sample.
pub fn moving_average(window: usize) -> Result<DigitalFilter> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "moving-average window must be odd and at least 3, got {window}"
        )));
    }
    Ok(DigitalFilter::Fir(FirFilter::new(vec![
        1.0 / window as f64;
        window
    ])?))
}

/// Complex response sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub frequencies: Vec<f64>,
    pub response: Vec<Complex64>,
}

impl FrequencyResponse {
    /// `20 log10 |H|`; zeros give negative infinity.
    pub fn magnitude_db(&self) -> Vec<f64> {
        self.response
            .iter()
            .map(|h| 20.0 * h.norm().log10())
            .collect()
    }

    /// As [`Self::magnitude_db`] but with magnitudes under
    /// [`MAGNITUDE_FLOOR`] reported as [`DB_FLOOR`].
    pub fn magnitude_db_floored(&self) -> Vec<f64> {
        self.response
            .iter()
            .map(|h| {
                let m = h.norm();
                if m < MAGNITUDE_FLOOR {
                    DB_FLOOR
                } else {
                    20.0 * m.log10()
                }
            })
            .collect()
    }

    pub fn phase(&self) -> Vec<f64> {
        self.response.iter().map(|&h| principal_phase(h)).collect()
    }

    /// Response of two cascaded passes.
    pub fn squared(&self) -> FrequencyResponse {
        FrequencyResponse {
            frequencies: self.frequencies.clone(),
            response: self.response.iter().map(|h| h * h).collect(),
        }
    }

    /// Response of a forward-backward pass pair: `|H|^2`, zero phase.
    pub fn zero_phase_composite(&self) -> FrequencyResponse {
        FrequencyResponse {
            frequencies: self.frequencies.clone(),
            response: self
                .response
                .iter()
                .map(|h| Complex64::new(h.norm_sqr(), 0.0))
                .collect(),
        }
    }
}

pub fn frequency_response(filter: &DigitalFilter, grid: &[f64]) -> Result<FrequencyResponse> {
    if let Some(&f) = grid.iter().find(|f| !(0.0..=0.5).contains(*f)) {
        return Err(Error::InvalidArgument(format!(
            "frequency {f} outside [0, 0.5]"
        )));
    }
    Ok(FrequencyResponse {
        frequencies: grid.to_vec(),
        response: grid
            .iter()
            .map(|&f| filter.response_at_frequency(f))
            .collect(),
    })
}

/// `|H(exp(j 2 pi k / n))|^2` for every DFT bin, mirrored so that
/// `H[k] == H[n - k]` exactly.
pub fn squared_magnitude_spectrum(filter: &DigitalFilter, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::TooShort {
            what: "sampled spectrum",
            needed: 2,
            got: n,
        });
    }
    let half: Vec<f64> = (0..=n / 2)
        .map(|k| filter.response_at_frequency(k as f64 / n as f64).norm_sqr())
        .collect();
    Ok((0..n).map(|k| half[k.min(n - k)]).collect())
}

/// Uniform grid of `intervals + 1` points on `[0, 0.5]` with `extra`
/// frequencies merged in.
pub fn response_grid(intervals: usize, extra: &[f64]) -> Vec<f64> {
    let intervals = intervals.max(1);
    let mut grid: Vec<f64> = (0..=intervals)
        .map(|i| 0.5 * i as f64 / intervals as f64)
        .chain(extra.iter().copied().filter(|f| (0.0..=0.5).contains(f)))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    grid
}
