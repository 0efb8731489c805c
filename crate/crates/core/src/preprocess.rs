//! Weekday-aware synthetic padding.
//!
//! Each synthetic day is extrapolated along the line through the two nearest
//! real days that fall on the same weekday: for a point `d` days beyond the
//! data, with `m = ceil(d / 7)`, the anchors lie `7m` and `7(m + 1)` days
//! away. Negative extrapolations are clamped to zero. The construction before
//! the first day mirrors the one after the last.

use crate::error::{Error, Result};
use crate::series::DailySeries;

pub const DEFAULT_PAD_DAYS: usize = 28;

/// Two same-weekday anchors need two full weeks of data.
pub const MIN_PAD_INPUT: usize = 14;

/// A series with synthetic days attached to both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedSeries {
    core: DailySeries,
    pad_len: usize,
    padded: Vec<f64>,
}

impl PaddedSeries {
    pub fn core(&self) -> &DailySeries {
        &self.core
    }

    pub fn pad_len(&self) -> usize {
        self.pad_len
    }

    pub fn values(&self) -> &[f64] {
        &self.padded
    }

    /// Drops the synthetic sections of `processed`, which must be aligned
    /// sample-for-sample with [`PaddedSeries::values`].
    pub fn unpad(&self, processed: &[f64]) -> Result<DailySeries> {
        if processed.len() != self.padded.len() {
            return Err(Error::LengthMismatch {
                expected: self.padded.len(),
                got: processed.len(),
            });
        }
        let body = &processed[self.pad_len..self.pad_len + self.core.len()];
        self.core.with_values(body.to_vec())
    }
}

/// Value of the synthetic point `d >= 1` days beyond the end of `x`.
fn extrapolate_after(x: &[f64], d: usize) -> f64 {
    let m = d.div_ceil(7);
    let t = x.len() - 1 + d;
    let near = x[t - 7 * m];
    let far = x[t - 7 * (m + 1)];
    (near + m as f64 * (near - far)).max(0.0)
}

/// Value of the synthetic point `d >= 1` days before the start of `x`.
fn extrapolate_before(x: &[f64], d: usize) -> f64 {
    let m = d.div_ceil(7);
    let near = x[7 * m - d];
    let far = x[7 * (m + 1) - d];
    (near + m as f64 * (near - far)).max(0.0)
}

/// Attaches `pad_len` synthetic days on each side of raw values.
pub fn pad_values(x: &[f64], pad_len: usize) -> Result<Vec<f64>> {
    if x.len() < MIN_PAD_INPUT {
        return Err(Error::TooShort {
            what: "padding",
            needed: MIN_PAD_INPUT,
            got: x.len(),
        });
    }
    let mut out = Vec::with_capacity(x.len() + 2 * pad_len);
    out.extend((1..=pad_len).rev().map(|d| extrapolate_before(x, d)));
    out.extend_from_slice(x);
    out.extend((1..=pad_len).map(|d| extrapolate_after(x, d)));
    Ok(out)
}

pub fn pad(series: &DailySeries, pad_len: usize) -> Result<PaddedSeries> {
    let padded = pad_values(series.values(), pad_len)?;
    Ok(PaddedSeries {
        core: series.clone(),
        pad_len,
        padded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn series(values: Vec<f64>) -> DailySeries {
        DailySeries::new(NaiveDate::from_ymd_opt(2020, 3, 1).unwrap(), values, "t").unwrap()
    }

    /// Independent scalar restatement: search for the smallest week multiple
    /// that keeps both anchors inside the data, then evaluate the two-point
    /// line at the synthetic position.
    fn oracle_after(x: &[f64], d: usize) -> f64 {
        let last = x.len() as i64 - 1;
        let pos = last + d as i64;
        let mut m = 1i64;
        while pos - 7 * m > last {
            m += 1;
        }
        let (p1, p2) = (pos - 7 * m, pos - 7 * (m + 1));
        let (y1, y2) = (x[p1 as usize], x[p2 as usize]);
        let slope = (y1 - y2) / (p1 - p2) as f64;
        let y = y1 + slope * (pos - p1) as f64;
        if y < 0.0 {
            0.0
        } else {
            y
        }
    }

    #[test]
    fn constant_series_pads_constant() {
        let p = pad(&series(vec![100.0; 20]), 28).unwrap();
        assert_eq!(p.values().len(), 76);
        assert!(p.values().iter().all(|&v| v == 100.0));
    }

    #[test]
    fn weekly_pattern_continues() {
        let week = [10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0];
        let x: Vec<f64> = (0..21).map(|i| week[i % 7]).collect();
        let p = pad(&series(x), 28).unwrap();
        // Padded index j corresponds to original index j - 28, and 28 is a
        // whole number of weeks, so the pattern phase is unchanged.
        for (j, &v) in p.values().iter().enumerate() {
            assert_eq!(v, week[j % 7], "padded index {j}");
        }
    }

    #[test]
    fn negative_extrapolation_clamps() {
        // The first synthetic day uses days 7 and 0 as anchors: 5 + (5 - 50) < 0.
        let mut x = vec![30.0; 14];
        x[7] = 5.0;
        x[0] = 50.0;
        assert_eq!(5.0 + (5.0 - 50.0), -40.0);
        assert_eq!(oracle_after(&x, 1), 0.0);
        assert_eq!(extrapolate_after(&x, 1), 0.0);
        let p = pad_values(&x, 1).unwrap();
        assert_eq!(p[p.len() - 1], 0.0);
    }

    #[test]
    fn too_short() {
        assert!(matches!(
            pad(&series(vec![1.0; 13]), 28),
            Err(Error::TooShort { needed: 14, .. })
        ));
    }

    #[test]
    fn unpad_errors_and_offsets() {
        let s = series((0..30).map(f64::from).collect());
        let p = pad(&s, 28).unwrap();
        assert_eq!(p.unpad(p.values()).unwrap(), s);
        let short = &p.values()[1..];
        assert!(matches!(p.unpad(short), Err(Error::LengthMismatch { .. })));
        let shifted: Vec<f64> = p.values().iter().map(|v| v + 1.0).collect();
        let back = p.unpad(&shifted).unwrap();
        assert!(back
            .values()
            .iter()
            .zip(s.values())
            .all(|(a, b)| *a == b + 1.0));
    }

    proptest! {
        #[test]
        fn pad_matches_oracle_and_contract(
            x in prop::collection::vec(-50.0f64..500.0, 14..80),
            pad_len in 0usize..40,
        ) {
            let p = pad(&series(x.clone()), pad_len).unwrap();
            let v = p.values();
            prop_assert_eq!(v.len(), x.len() + 2 * pad_len);
            prop_assert_eq!(&v[pad_len..pad_len + x.len()], &x[..]);
            prop_assert!(v.iter().take(pad_len).all(|&y| y >= 0.0));
            prop_assert!(v.iter().skip(pad_len + x.len()).all(|&y| y >= 0.0));
            for d in 1..=pad_len {
                let got = v[pad_len + x.len() - 1 + d];
                prop_assert!((got - oracle_after(&x, d)).abs() <= 1e-9 * (1.0 + got.abs()));
                // Mirror: reversing the data turns the leading pad into a trailing one.
                let rev: Vec<f64> = x.iter().rev().copied().collect();
                let before = v[pad_len - d];
                prop_assert!((before - oracle_after(&rev, d)).abs() <= 1e-9 * (1.0 + before.abs()));
            }
            let back = p.unpad(v).unwrap();
            prop_assert_eq!(back.values(), &x[..]);
        }

        #[test]
        fn anchors_share_weekday(d in 1usize..200) {
            let m = d.div_ceil(7);
            prop_assert!(7 * m >= d && 7 * m < d + 7);
            prop_assert_eq!((d as i64 - 7 * m as i64).rem_euclid(7), d as i64 % 7);
            prop_assert_eq!((d as i64 - 7 * (m as i64 + 1)).rem_euclid(7), d as i64 % 7);
        }
    }
}
