//! Reading daily series from the two CSV layouts the tool understands.
//!
//! *Wide* files carry one row per region with leading metadata columns
//! followed by one column per date (`M/D/YY` or `M/D/YYYY`). Rows whose
//! country/region field matches the selector are summed, so a country that
//! is split into provinces comes back as a single series.
//!
//! *Long* files carry `date,value` pairs with ISO-8601 dates, one day per row.

use std::fmt::Write as _;

use chrono::{Days, NaiveDate};

use crate::error::{Error, Result};
use crate::series::DailySeries;

/// How the numbers in the file should be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountMode {
    /// Running totals; converted with [`to_daily`].
    Cumulative,
    /// Already per-day counts.
    #[default]
    Daily,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    Wide,
    #[default]
    Long,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub format: InputFormat,
    pub mode: CountMode,
    /// Country/region label for wide files; ignored for long files.
    pub selector: Option<String>,
    /// Inclusive date range applied after cumulative conversion.
    pub range: Option<(NaiveDate, NaiveDate)>,
}

/// Parses `text` according to `opts`.
pub fn ingest(text: &str, opts: &IngestOptions) -> Result<DailySeries> {
    let raw = match opts.format {
        InputFormat::Wide => {
            let selector = opts
                .selector
                .as_deref()
                .ok_or_else(|| Error::InvalidArgument("wide input needs a selector".into()))?;
            parse_wide_csv(text, selector)?
        }
        InputFormat::Long => parse_long_csv(text)?,
    };
    let series = match opts.mode {
        CountMode::Cumulative => to_daily(&raw),
        CountMode::Daily => raw,
    };
    match opts.range {
        Some((from, to)) => series.slice_dates(from, to),
        None => Ok(series),
    }
}

const REGION_HEADERS: [&str; 3] = ["country/region", "country_region", "country"];

fn looks_like_date(field: &str) -> bool {
    let parts: Vec<&str> = field.trim().split('/').collect();
    parts.len() == 3
        && parts
            .iter()
            .all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
}

fn parse_us_date(field: &str) -> Option<NaiveDate> {
    let mut it = field.trim().split('/').map(|p| p.parse::<u32>().ok());
    let (month, day, year) = (it.next()??, it.next()??, it.next()??);
    let year = match year {
        0..=99 => 2000 + year as i32,
        1000..=9999 => year as i32,
        _ => return None,
    };
    NaiveDate::from_ymd_opt(year, month, day)
}

fn parse_number(cell: &str, line: u64) -> Result<f64> {
    let trimmed = cell.trim();
    trimmed
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::NonNumeric {
            line,
            value: trimmed.to_string(),
        })
}

fn check_consecutive(prev: NaiveDate, next: NaiveDate) -> Result<()> {
    if next == prev {
        return Err(Error::DuplicateDate(next));
    }
    if prev.checked_add_days(Days::new(1)) != Some(next) {
        return Err(Error::DatesNotConsecutive { prev, next });
    }
    Ok(())
}

/// Sums every row whose country/region equals `selector` (case-insensitive).
pub fn parse_wide_csv(text: &str, selector: &str) -> Result<DailySeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();

    let region_col = headers
        .iter()
        .position(|h| REGION_HEADERS.contains(&h.to_ascii_lowercase().as_str()))
        .ok_or(Error::NoRegionColumn)?;

    // Date columns form a contiguous suffix of the header.
    let names: Vec<&str> = headers.iter().collect();
    let first_date_col = names
        .iter()
        .rposition(|h| !looks_like_date(h))
        .map_or(0, |i| i + 1);
    if first_date_col == headers.len() {
        return Err(Error::NoDateColumns);
    }
    let mut dates = Vec::with_capacity(headers.len() - first_date_col);
    for h in headers.iter().skip(first_date_col) {
        let date = parse_us_date(h).ok_or_else(|| Error::BadDateHeader(h.to_string()))?;
        if let Some(&prev) = dates.last() {
            check_consecutive(prev, date)?;
        }
        dates.push(date);
    }

    let wanted = selector.trim().to_lowercase();
    let mut sums = vec![0.0; dates.len()];
    let mut matched = false;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let region = record.get(region_col).unwrap_or_default();
        if region.to_lowercase() != wanted {
            continue;
        }
        matched = true;
        for (sum, cell) in sums.iter_mut().zip(record.iter().skip(first_date_col)) {
            *sum += parse_number(cell, line)?;
        }
    }
    if !matched {
        return Err(Error::NoMatchingRow(selector.to_string()));
    }
    DailySeries::new(dates[0], sums, selector)
}

/// `date,value` rows; an optional `date,value` header line is skipped.
pub fn parse_long_csv(text: &str) -> Result<DailySeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut start = None;
    let mut last: Option<NaiveDate> = None;
    let mut values = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(Error::MalformedRow {
                line,
                reason: format!("expected 2 fields, found {}", record.len()),
            });
        }
        if i == 0 && record[0].eq_ignore_ascii_case("date") {
            continue;
        }
        let date =
            NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|_| Error::BadDate {
                line,
                value: record[0].to_string(),
            })?;
        if let Some(prev) = last {
            check_consecutive(prev, date)?;
        }
        start.get_or_insert(date);
        last = Some(date);
        values.push(parse_number(&record[1], line)?);
    }
    let start = start.ok_or(Error::EmptySeries)?;
    DailySeries::new(start, values, "")
}

/// Long-format text that [`parse_long_csv`] reads back bit-for-bit.
pub fn to_long_csv(series: &DailySeries) -> String {
    let mut out = String::from("date,value\n");
    for (i, v) in series.values().iter().enumerate() {
        // `Display` for f64 prints the shortest representation that round-trips.
        let _ = writeln!(out, "{},{}", series.date_at(i).format("%Y-%m-%d"), v);
    }
    out
}

/// Converts running totals to per-day increments. The first day keeps its
/// total; decreases become negative values.
pub fn to_daily(cumulative: &DailySeries) -> DailySeries {
    let v = cumulative.values();
    let mut daily = Vec::with_capacity(v.len());
    daily.push(v[0]);
    daily.extend(v.windows(2).map(|w| w[1] - w[0]));
    cumulative
        .with_values(daily)
        .expect("difference of finite values has the same length")
}

/// Inverse of [`to_daily`].
pub fn to_cumulative(daily: &DailySeries) -> DailySeries {
    let totals = daily
        .values()
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect();
    daily.with_values(totals).expect("same length")
}
