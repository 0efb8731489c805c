//! Minimum-order digital elliptic (Cauer) filters.
//!
//! The analog prototype is built from Jacobi elliptic functions evaluated by
//! descending Landen transformations, with the passband edge normalized to 1
//! rad/s. The design keeps the passband edge and ripple exactly, solves the
//! degree equation for the selectivity the integer order can reach, and
//! therefore lands its stopband edge on or inside the requested one. The
//! prototype is moved to the requested band with the usual lowpass, highpass
//! or bandpass substitution on pre-warped edges and mapped to the z-plane by
//! the bilinear transform.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{BandEdges, Biquad, FilterDesignSpec, SosFilter};
use crate::error::{Error, Result};

/// Design margin in dB. The prototype ripple is reduced by twice this amount
/// and the overall gain lowered by it, so the realized response sits strictly
/// inside the template instead of touching it.
pub const DESIGN_MARGIN_DB: f64 = 1e-5;

/// Orders beyond this are treated as a failed design.
pub const MAX_ORDER: usize = 40;

/// Points per band used to verify a realized design.
pub const VERIFY_POINTS_PER_BAND: usize = 2048;

const LANDEN_TOL: f64 = 1e-16;

/// Descending Landen moduli of `k`, given also its complement `kp` so moduli
/// close to 1 keep their precision.
fn landen(k: f64, kp: f64) -> Vec<f64> {
    let mut moduli = Vec::new();
    let (mut k, mut kp) = (k, kp);
    while k > LANDEN_TOL {
        let next = (k / (1.0 + kp)).powi(2);
        kp = (1.0 - next * next).sqrt();
        k = next;
        moduli.push(k);
    }
    moduli
}

/// Complete elliptic integral of the first kind, K(k).
fn ellipk(k: f64, kp: f64) -> f64 {
    landen(k, kp).iter().map(|v| 1.0 + v).product::<f64>() * PI / 2.0
}

/// cd(uK, k) with `u` in units of the quarter period K.
fn cde(u: Complex64, k: f64, kp: f64) -> Complex64 {
    let moduli = landen(k, kp);
    let mut w = (u * PI / 2.0).cos();
    for v in moduli.iter().rev() {
        w = (1.0 + v) * w / (1.0 + v * w * w);
    }
    w
}

/// sn(uK, k) with `u` in units of K.
fn sne(u: Complex64, k: f64, kp: f64) -> Complex64 {
    let moduli = landen(k, kp);
    let mut w = (u * PI / 2.0).sin();
    for v in moduli.iter().rev() {
        w = (1.0 + v) * w / (1.0 + v * w * w);
    }
    w
}

/// Inverse of [`sne`]: returns `u` (in units of K) with sn(uK, k) = w.
fn asne(w: Complex64, k: f64, kp: f64) -> Complex64 {
    let moduli = landen(k, kp);
    let mut w = w;
    let mut prev = k;
    for &v in &moduli {
        w = w / (1.0 + (1.0 - w * w * prev * prev).sqrt()) * 2.0 / (1.0 + v);
        prev = v;
    }
    w.asin() * 2.0 / PI
}

/// Solves the degree equation for the selectivity reached by an order-`n`
/// filter with discrimination `k1`. Returns (k, k').
fn ellipdeg(n: usize, k1: f64, k1p: f64) -> (f64, f64) {
    let half = n / 2;
    let product: f64 = (1..=half)
        .map(|i| {
            let u = (2 * i - 1) as f64 / n as f64;
            sne(Complex64::new(u, 0.0), k1p, k1).re
        })
        .product();
    let kp = k1p.powi(n as i32) * product.powi(4);
    ((1.0 - kp * kp).sqrt(), kp)
}

/// A real root or a conjugate pair represented by its upper member.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Root {
    Real(f64),
    Pair(Complex64),
}

impl Root {
    fn from_complex(c: Complex64) -> Root {
        if c.im.abs() <= 1e-14 * c.norm().max(1.0) {
            Root::Real(c.re)
        } else if c.im > 0.0 {
            Root::Pair(c)
        } else {
            Root::Pair(c.conj())
        }
    }

    fn value(self) -> Complex64 {
        match self {
            Root::Real(r) => Complex64::new(r, 0.0),
            Root::Pair(c) => c,
        }
    }

    fn degree(self) -> usize {
        match self {
            Root::Real(_) => 1,
            Root::Pair(_) => 2,
        }
    }
}

/// Roots of an analog transfer function. Zeros at infinity are implicit:
/// their count is the pole degree minus the finite zero degree.
#[derive(Debug, Clone, Default)]
struct AnalogZp {
    zeros: Vec<Root>,
    poles: Vec<Root>,
}

fn degree(roots: &[Root]) -> usize {
    roots.iter().map(|r| r.degree()).sum()
}

impl AnalogZp {
    fn infinite_zeros(&self) -> usize {
        degree(&self.poles) - degree(&self.zeros)
    }
}

/// Normalized analog lowpass prototype of order `n` (passband edge 1 rad/s).
/// Returns the roots and the selectivity actually achieved.
fn prototype(n: usize, ripple_db: f64, attenuation_db: f64) -> (AnalogZp, f64) {
    let ep = (10f64.powf(ripple_db / 10.0) - 1.0).sqrt();
    let es = (10f64.powf(attenuation_db / 10.0) - 1.0).sqrt();
    let k1 = ep / es;
    let k1p = (1.0 - k1 * k1).sqrt();
    let (k, kp) = ellipdeg(n, k1, k1p);

    let v0 = (-Complex64::i() * asne(Complex64::i() / ep, k1, k1p) / n as f64).re;
    let mut zp = AnalogZp::default();
    for i in 1..=n / 2 {
        let u = (2 * i - 1) as f64 / n as f64;
        let zeta = cde(Complex64::new(u, 0.0), k, kp).re;
        zp.zeros
            .push(Root::Pair(Complex64::new(0.0, 1.0 / (k * zeta))));
        let p = Complex64::i() * cde(Complex64::new(u, -v0), k, kp);
        zp.poles.push(Root::from_complex(p));
    }
    if n % 2 == 1 {
        let p0 = Complex64::i() * sne(Complex64::new(0.0, v0), k, kp);
        zp.poles.push(Root::Real(p0.re));
    }
    (zp, k)
}

fn map_roots(roots: &[Root], f: impl Fn(Complex64) -> Complex64) -> Vec<Root> {
    roots
        .iter()
        .map(|r| Root::from_complex(f(r.value())))
        .collect()
}

/// Both solutions of s^2 - r*bw*s + w0sq = 0 for every root r.
fn bandpass_roots(roots: &[Root], bw: f64, w0sq: f64) -> Vec<Root> {
    let mut out = Vec::new();
    for &root in roots {
        match root {
            Root::Pair(r) => {
                let half = r * bw / 2.0;
                let disc = (half * half - w0sq).sqrt();
                out.push(Root::from_complex(half + disc));
                out.push(Root::from_complex(half - disc));
            }
            Root::Real(r) => {
                // A real root yields either one conjugate pair or two real roots.
                let half = r * bw / 2.0;
                let d = half * half - w0sq;
                if d < 0.0 {
                    out.push(Root::Pair(Complex64::new(half, (-d).sqrt())));
                } else {
                    out.push(Root::Real(half + d.sqrt()));
                    out.push(Root::Real(half - d.sqrt()));
                }
            }
        }
    }
    out
}

/// Pre-warped analog edge for a digital frequency in cycles/sample.
fn prewarp(f: f64) -> f64 {
    (PI * f).tan()
}

/// Selectivity the band edges demand of the normalized prototype.
fn required_selectivity(edges: &BandEdges) -> f64 {
    match *edges {
        BandEdges::LowPass { pass, stop } => prewarp(pass) / prewarp(stop),
        BandEdges::HighPass { pass, stop } => prewarp(stop) / prewarp(pass),
        BandEdges::BandPass { pass, stop } => {
            let (p1, p2) = (prewarp(pass[0]), prewarp(pass[1]));
            let (bw, w0sq) = (p2 - p1, p1 * p2);
            let stretch = |w: f64| ((w * w - w0sq) / (bw * w)).abs();
            1.0 / stretch(prewarp(stop[0])).min(stretch(prewarp(stop[1])))
        }
    }
}

/// Smallest order satisfying the elliptic degree equation.
pub fn estimate_order(spec: &FilterDesignSpec) -> usize {
    let k = required_selectivity(&spec.edges);
    let kp = (1.0 - k * k).sqrt();
    let ep = (10f64.powf(spec.passband_ripple_db / 10.0) - 1.0).sqrt();
    let es = (10f64.powf(spec.stopband_attenuation_db / 10.0) - 1.0).sqrt();
    let k1 = ep / es;
    let k1p = (1.0 - k1 * k1).sqrt();
    let ratio = ellipk(k, kp) * ellipk(k1p, k1) / (ellipk(kp, k) * ellipk(k1, k1p));
    (ratio.ceil() as usize).max(1)
}

/// Reference point on the unit circle where the prototype's DC gain lands.
fn reference_point(edges: &BandEdges) -> Complex64 {
    match *edges {
        BandEdges::LowPass { .. } => Complex64::new(1.0, 0.0),
        BandEdges::HighPass { .. } => Complex64::new(-1.0, 0.0),
        BandEdges::BandPass { pass, .. } => {
            let w0 = (prewarp(pass[0]) * prewarp(pass[1])).sqrt();
            Complex64::from_polar(1.0, 2.0 * w0.atan())
        }
    }
}

fn biquad_from_roots(zeros: &[Root], poles: &[Root]) -> Biquad {
    fn coefficients(roots: &[Root]) -> [f64; 2] {
        match roots {
            [] => [0.0, 0.0],
            [Root::Real(r)] => [-r, 0.0],
            [Root::Real(r1), Root::Real(r2)] => [-(r1 + r2), r1 * r2],
            [Root::Pair(c)] => [-2.0 * c.re, c.norm_sqr()],
            _ => unreachable!("a section holds at most two roots"),
        }
    }
    let [b1, b2] = coefficients(zeros);
    Biquad::new([1.0, b1, b2], coefficients(poles))
}

fn take_nearest(pool: &mut Vec<Root>, target: Complex64, want_pair: bool) -> Option<Root> {
    let index = pool
        .iter()
        .enumerate()
        .filter(|(_, r)| matches!(r, Root::Pair(_)) == want_pair)
        .min_by(|(_, a), (_, b)| {
            (a.value() - target)
                .norm()
                .total_cmp(&(b.value() - target).norm())
        })
        .map(|(i, _)| i)?;
    Some(pool.swap_remove(index))
}

/// Groups digital roots into second-order sections. Poles nearest the unit
/// circle are matched first with their nearest zeros; the resulting sections
/// are ordered by ascending pole radius.
fn pair_sections(zeros: Vec<Root>, poles: Vec<Root>) -> Vec<Biquad> {
    let mut real_poles: Vec<f64> = poles
        .iter()
        .filter_map(|p| match p {
            Root::Real(r) => Some(*r),
            Root::Pair(_) => None,
        })
        .collect();
    real_poles.sort_by(f64::total_cmp);
    let mut groups: Vec<Vec<Root>> = poles
        .iter()
        .filter(|p| matches!(p, Root::Pair(_)))
        .map(|p| vec![*p])
        .collect();
    for chunk in real_poles.chunks(2) {
        groups.push(chunk.iter().map(|&r| Root::Real(r)).collect());
    }
    let radius = |g: &Vec<Root>| g.iter().map(|r| r.value().norm()).fold(0.0, f64::max);
    groups.sort_by(|a, b| radius(b).total_cmp(&radius(a)));

    let mut pool = zeros;
    let mut sections: Vec<(f64, Biquad)> = Vec::with_capacity(groups.len());
    for group in &groups {
        let target = group[0].value();
        let need = degree(group);
        let mut chosen = Vec::new();
        if need == 2 {
            if let Some(pair) = take_nearest(&mut pool, target, true) {
                chosen.push(pair);
            }
        }
        while degree(&chosen) < need {
            match take_nearest(&mut pool, target, false) {
                Some(r) => chosen.push(r),
                None => break,
            }
        }
        if chosen.is_empty() && need == 1 {
            // Only pairs remain; a one-pole section can still hold them.
            if let Some(pair) = take_nearest(&mut pool, target, true) {
                chosen.push(pair);
            }
        }
        sections.push((radius(group), biquad_from_roots(&chosen, group)));
    }
    debug_assert!(pool.is_empty(), "unpaired zeros left over");
    sections.sort_by(|a, b| a.0.total_cmp(&b.0));
    sections.into_iter().map(|(_, s)| s).collect()
}

/// Designs an elliptic filter of exactly order `n` for the prototype
/// (lowpass-equivalent) degree; bandpass filters have twice as many poles.
pub fn design_with_order(spec: &FilterDesignSpec, n: usize) -> Result<SosFilter> {
    spec.validate()?;
    let ripple = spec.passband_ripple_db - 2.0 * DESIGN_MARGIN_DB;
    let (proto, _) = prototype(n, ripple, spec.stopband_attenuation_db);

    let analog = match spec.edges {
        BandEdges::LowPass { pass, .. } => {
            let wp = prewarp(pass);
            AnalogZp {
                zeros: map_roots(&proto.zeros, |r| r * wp),
                poles: map_roots(&proto.poles, |r| r * wp),
            }
        }
        BandEdges::HighPass { pass, .. } => {
            let wp = prewarp(pass);
            let mut zeros = map_roots(&proto.zeros, |r| wp / r);
            zeros.extend(std::iter::repeat_n(Root::Real(0.0), proto.infinite_zeros()));
            AnalogZp {
                zeros,
                poles: map_roots(&proto.poles, |r| wp / r),
            }
        }
        BandEdges::BandPass { pass, .. } => {
            let (p1, p2) = (prewarp(pass[0]), prewarp(pass[1]));
            let (bw, w0sq) = (p2 - p1, p1 * p2);
            let mut zeros = bandpass_roots(&proto.zeros, bw, w0sq);
            zeros.extend(std::iter::repeat_n(Root::Real(0.0), proto.infinite_zeros()));
            AnalogZp {
                zeros,
                poles: bandpass_roots(&proto.poles, bw, w0sq),
            }
        }
    };

    let bilinear = |s: Complex64| (1.0 + s) / (1.0 - s);
    let mut zeros = map_roots(&analog.zeros, bilinear);
    zeros.extend(std::iter::repeat_n(
        Root::Real(-1.0),
        analog.infinite_zeros(),
    ));
    let poles = map_roots(&analog.poles, bilinear);

    let z_ref = reference_point(&spec.edges);
    let mut sections = pair_sections(zeros, poles);
    for s in &mut sections {
        let g = s.response_at(z_ref).norm();
        s.scale_numerator(1.0 / g);
    }
    let dc_db = if n.is_multiple_of(2) { -ripple } else { 0.0 };
    let target = 10f64.powf((dc_db - DESIGN_MARGIN_DB) / 20.0);
    let mut filter = SosFilter::new(sections, 1.0);
    let raw = filter.response_at(z_ref).norm();
    filter.set_gain(target / raw);
    filter.check_stable()?;
    Ok(filter)
}

/// Minimum-order design that meets `spec` on the verification grid.
pub fn design_elliptic(spec: &FilterDesignSpec) -> Result<SosFilter> {
    spec.validate()?;
    let mut n = estimate_order(spec);
    while n <= MAX_ORDER {
        let filter = design_with_order(spec, n)?;
        if spec
            .template_violation(&filter, VERIFY_POINTS_PER_BAND)
            .is_none()
        {
            return Ok(filter);
        }
        n += 1;
    }
    Err(Error::DesignFailed(MAX_ORDER))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k_and_kp(k: f64) -> (f64, f64) {
        (k, (1.0 - k * k).sqrt())
    }

    #[test]
    fn complete_integral_known_values() {
        // K(0) = pi/2; K(1/sqrt 2) = Gamma(1/4)^2 / (4 sqrt(pi)).
        assert!((ellipk(0.0, 1.0) - PI / 2.0).abs() < 1e-15);
        let gamma_quarter = 3.625_609_908_221_908_f64;
        let expect = gamma_quarter * gamma_quarter / (4.0 * PI.sqrt());
        let (k, kp) = k_and_kp(0.5f64.sqrt());
        assert!((ellipk(k, kp) - expect).abs() < 1e-13);
    }

    #[test]
    fn jacobi_identities() {
        let (k, kp) = k_and_kp(0.8);
        for i in 0..20 {
            let u = Complex64::new(i as f64 / 20.0, 0.0);
            let sn = sne(u, k, kp).re;
            // cd(u) = sn(u + K) and sn(K) = 1.
            let cd_shift = sne(u + 1.0, k, kp).re;
            assert!((cde(u, k, kp).re - cd_shift).abs() < 1e-12);
            let back = asne(Complex64::new(sn, 0.0), k, kp).re;
            assert!((back - u.re).abs() < 1e-10);
        }
        assert!((sne(Complex64::new(1.0, 0.0), k, kp).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degree_equation_round_trip() {
        // For the k returned by ellipdeg, the order ratio is exactly n.
        let k1: f64 = 0.001;
        let k1p = (1.0 - k1 * k1).sqrt();
        for n in 2..12 {
            let (k, kp) = ellipdeg(n, k1, k1p);
            let ratio = ellipk(k, kp) * ellipk(k1p, k1) / (ellipk(kp, k) * ellipk(k1, k1p));
            assert!((ratio - n as f64).abs() < 1e-8, "n={n} ratio={ratio}");
        }
    }

    #[test]
    fn prototype_poles_in_left_half_plane() {
        for n in 1..12 {
            let (zp, _) = prototype(n, 0.5, 40.0);
            assert_eq!(degree(&zp.poles), n);
            assert_eq!(degree(&zp.zeros), 2 * (n / 2));
            assert!(zp.poles.iter().all(|p| p.value().re < 0.0));
        }
    }

    #[test]
    fn prototype_hits_passband_and_stopband_levels() {
        let (ap, as_) = (0.5, 40.0);
        let n = 5;
        let (zp, k) = prototype(n, ap, as_);
        let eval = |w: f64| {
            let s = Complex64::new(0.0, w);
            let mut h = Complex64::new(1.0, 0.0);
            for z in &zp.zeros {
                let z = z.value();
                h *= (s - z) * (s - z.conj()) / (z * z.conj());
            }
            for p in &zp.poles {
                let v = p.value();
                h /= match p {
                    Root::Real(_) => (s - v) / (-v),
                    Root::Pair(_) => (s - v) * (s - v.conj()) / (v * v.conj()),
                };
            }
            h.norm()
        };
        let edge_db = 20.0 * eval(1.0).log10();
        assert!((edge_db + ap).abs() < 1e-9, "edge {edge_db}");
        let worst_stop = (0..2000)
            .map(|i| 1.0 / k * (1.0 + i as f64 / 100.0))
            .map(|w| 20.0 * eval(w).log10())
            .fold(f64::MIN, f64::max);
        assert!((worst_stop + as_).abs() < 1e-6, "stop {worst_stop}");
    }
}
