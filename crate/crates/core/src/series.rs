use chrono::{Days, NaiveDate};

use crate::error::{Error, Result};

/// Uniformly sampled observations, one per calendar day, starting at
/// `start_date`.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeries {
    start_date: NaiveDate,
    values: Vec<f64>,
    label: String,
}

impl DailySeries {
    /// Negative values are allowed (data revisions produce them); NaN and
    /// infinities are not.
    pub fn new(start_date: NaiveDate, values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            start_date,
            values,
            label: label.into(),
        })
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
    }

    pub fn end_date(&self) -> NaiveDate {
        self.date_at(self.values.len() - 1)
    }

    pub fn date_at(&self, index: usize) -> NaiveDate {
        self.start_date + Days::new(index as u64)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same dates and label, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                got: values.len(),
            });
        }
        Self::new(self.start_date, values, self.label.clone())
    }

    /// The last `n` days.
    pub fn tail(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::TooShort {
                what: "tail window",
                needed: n.max(1),
                got: self.len(),
            });
        }
        let skip = self.len() - n;
        Self::new(
            self.date_at(skip),
            self.values[skip..].to_vec(),
            self.label.clone(),
        )
    }

    /// Inclusive calendar slice.
    pub fn slice_dates(&self, from: NaiveDate, to: NaiveDate) -> Result<Self> {
        let (first, last) = (self.start_date, self.end_date());
        if from > to || from < first || to > last {
            return Err(Error::RangeOutsideSpan {
                from,
                to,
                first,
                last,
            });
        }
        let lo = (from - first).num_days() as usize;
        let hi = (to - first).num_days() as usize;
        Self::new(from, self.values[lo..=hi].to_vec(), self.label.clone())
    }
}
