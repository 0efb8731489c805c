//! Regenerates the synthetic CSV fixtures under `tests/fixtures`.
//!
//! `cargo run --example make_fixtures` rewrites them byte-for-byte; the
//! generator is seeded, so the output never changes.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use chrono::{Days, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gaussian sample by Box-Muller.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * PI * v).cos()
}

/// Daily counts of a logistic outbreak: the derivative of a logistic curve.
fn logistic_wave(t: f64, total: f64, centre: f64, width: f64) -> f64 {
    let z = ((t - centre) / width).exp();
    total / width * z / (1.0 + z).powi(2)
}

/// Weekday reporting modulation: 7-day cycle plus its second and third
/// harmonics.
fn weekly(t: f64, depth: f64) -> f64 {
    let w = 2.0 * PI * t / 7.0;
    1.0 + depth
        * (0.6 * (w + 0.4).cos() + 0.25 * (2.0 * w - 1.1).cos() + 0.12 * (3.0 * w + 2.3).cos())
}

fn long_csv(start: NaiveDate, values: &[f64]) -> String {
    let mut out = String::from("date,value\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{},{}", start + Days::new(i as u64), v);
    }
    out
}

/// 200 days: one logistic wave, weekly harmonics and noise.
fn epidemic_200(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..200)
        .map(|i| {
            let t = i as f64;
            let base = logistic_wave(t, 60_000.0, 95.0, 14.0) + 40.0;
            let v = base * weekly(t, 0.35) + 0.03 * base * normal(rng);
            v.max(0.0).round()
        })
        .collect()
}

/// A year of national daily deaths: three waves of different sizes.
fn national_deaths(rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..366)
        .map(|i| {
            let t = i as f64;
            let base = logistic_wave(t, 70_000.0, 45.0, 9.0)
                + logistic_wave(t, 55_000.0, 150.0, 14.0)
                + logistic_wave(t, 200_000.0, 310.0, 20.0)
                + 15.0;
            let v = base * weekly(t, 0.45) + 0.04 * base * normal(rng);
            v.max(0.0).round()
        })
        .collect()
}

fn cumulative(daily: &[f64]) -> Vec<f64> {
    daily
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Wide cumulative layout with one row per region.
fn wide_csv(start: NaiveDate, rows: &[(&str, &str, Vec<f64>)]) -> String {
    let days = rows[0].2.len();
    let mut out = String::from("Province/State,Country/Region,Lat,Long");
    for i in 0..days {
        let d = start + Days::new(i as u64);
        let _ = write!(out, ",{}", d.format("%-m/%-d/%y"));
    }
    out.push('\n');
    for (province, country, values) in rows {
        let province = if province.contains(',') {
            format!("\"{province}\"")
        } else {
            province.to_string()
        };
        let _ = write!(out, "{province},{country},0.0,0.0");
        for v in values {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    fs::create_dir_all(&dir).expect("fixture directory");

    let mut rng = ChaCha8Rng::seed_from_u64(20200301);
    let start = NaiveDate::from_ymd_opt(2020, 3, 1).unwrap();
    fs::write(
        dir.join("epidemic_200.csv"),
        long_csv(start, &epidemic_200(&mut rng)),
    )
    .unwrap();

    let deaths = national_deaths(&mut rng);
    fs::write(dir.join("national_deaths.csv"), long_csv(start, &deaths)).unwrap();

    // Wide cumulative file: the national series split over three provinces
    // of one country, plus two unrelated countries.
    let shares = [0.5, 0.3, 0.2];
    let mut rows: Vec<(&str, &str, Vec<f64>)> = Vec::new();
    let names = ["North", "Lakes, East", "South"];
    let mut assigned = vec![0.0; deaths.len()];
    for (k, (&share, name)) in shares.iter().zip(names).enumerate() {
        let part: Vec<f64> = if k + 1 == shares.len() {
            deaths.iter().zip(&assigned).map(|(d, a)| d - a).collect()
        } else {
            deaths.iter().map(|d| (d * share).floor()).collect()
        };
        for (a, p) in assigned.iter_mut().zip(&part) {
            *a += p;
        }
        rows.push((name, "Freedonia", cumulative(&part)));
    }
    let other: Vec<f64> = (0..deaths.len())
        .map(|i| (logistic_wave(i as f64, 9000.0, 120.0, 12.0) * weekly(i as f64, 0.3)).round())
        .collect();
    rows.push(("", "Sylvania", cumulative(&other)));
    rows.push(("", "Genovia", vec![0.0; deaths.len()]));
    fs::write(dir.join("wide_cumulative.csv"), wide_csv(start, &rows)).unwrap();
}
