//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL
//! line per criterion and exits non-zero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use chrono::NaiveDate;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use episignal::apply::{apply_zero_phase, pipeline, InitialState, Method, PipelineOptions};
use episignal::derivative::{central_difference_8, first_difference, frequency_domain_derivative};
use episignal::design::{moving_average, Preset};
use episignal::ingest::parse_long_csv;
use episignal::preprocess::{pad, pad_values};
use episignal::resynthesis::{resynthesize, ResynthOptions, DEFAULT_PERIODS};
use episignal::spectral::{dft, magnitude_phase, reconstruct};
use episignal::DailySeries;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ma_nulls() -> Outcome {
    let ma = moving_average(7).map_err(|e| e.to_string())?;
    let worst = [1.0, 2.0, 3.0]
        .iter()
        .map(|k| ma.response_at_frequency(k / 7.0).norm())
        .fold(0.0, f64::max);
    check(
        worst < 1e-12,
        format!("max |H| at k/7 = {worst:.3e} (limit 1e-12)"),
    )
}

fn ma_phase() -> Outcome {
    let ma = moving_average(7).map_err(|e| e.to_string())?;
    let mut bad = Vec::new();
    for i in 1..400 {
        let inside = 1.0 / 7.0 + (1.0 / 7.0) * i as f64 / 400.0;
        let h = ma.response_at_frequency(inside);
        if !(h.im == 0.0 && h.re < 0.0 && h.arg() == PI) {
            bad.push(inside);
        }
        let below = (1.0 / 7.0) * i as f64 / 400.0;
        let h = ma.response_at_frequency(below);
        if !(h.im == 0.0 && h.re > 0.0 && h.arg() == 0.0) {
            bad.push(below);
        }
    }
    check(
        bad.is_empty(),
        format!(
            "798 grid points, {} with wrong phase {:?}",
            bad.len(),
            &bad[..bad.len().min(3)]
        ),
    )
}

fn elliptic_templates() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for p in Preset::ELLIPTIC {
        let t0 = Instant::now();
        let spec = p.spec().expect("elliptic");
        let filter = p.build().map_err(|e| format!("{p}: {e}"))?;
        let one = spec.measure(&filter, 1, 4096);
        let two = spec.measure(&filter, 2, 4096);
        let secs = t0.elapsed().as_secs_f64();
        let pass = one.meets(0.01, 40.0) && two.meets(0.02, 80.0) && secs < 1.0;
        ok &= pass;
        lines.push(format!(
            "{p}: 1x [{:.5}, {:.1e}] / {:.3} dB, 2x [{:.5}] / {:.3} dB, {secs:.2}s",
            one.passband_min_db,
            one.passband_max_db,
            one.stopband_max_db,
            two.passband_min_db,
            two.stopband_max_db
        ));
    }
    check(ok, lines.join("; "))
}

fn zero_phase() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for p in Preset::ELLIPTIC {
        let (lo, hi) = p.passband();
        let f = 0.5 * (lo + hi);
        let filter = p.build().map_err(|e| e.to_string())?;
        let n = 6000;
        let x: Vec<f64> = (0..n)
            .map(|i| (2.0 * PI * f * i as f64 + 0.3).cos())
            .collect();
        let y =
            apply_zero_phase(&filter, &x, InitialState::SteadyState).map_err(|e| e.to_string())?;
        let core = 2000..4000;
        let xc = |lag: i64| -> f64 {
            core.clone()
                .map(|i| x[i] * y[(i as i64 + lag) as usize])
                .sum()
        };
        // A pure tone correlates equally well at whole-period lags, so the
        // search is confined to half a period either side.
        let reach = (0.5 / f).floor() as i64;
        let lag = (-reach..=reach)
            .max_by(|a, b| xc(*a).total_cmp(&xc(*b)))
            .unwrap();
        let ratio = rms(&y[core.clone()]) / rms(&x[core.clone()]);
        let pass = lag == 0 && (ratio - 1.0).abs() <= 0.003;
        ok &= pass;
        lines.push(format!(
            "{p}: f={f:.4} lag {lag} gain {:+.4}%",
            100.0 * (ratio - 1.0)
        ));
    }
    check(ok, lines.join("; "))
}

fn method_equivalence() -> Outcome {
    let t0 = Instant::now();
    let text = std::fs::read_to_string(fixture("epidemic_200.csv")).map_err(|e| e.to_string())?;
    let s = parse_long_csv(&text).map_err(|e| e.to_string())?;
    let signal = rms(s.values());
    let mut ok = true;
    let mut lines = Vec::new();
    for p in Preset::ELLIPTIC {
        let opts = PipelineOptions::default();
        let a = pipeline(&s, p, Method::ZeroPhase, opts).map_err(|e| e.to_string())?;
        let b = pipeline(&s, p, Method::FrequencyDomain, opts).map_err(|e| e.to_string())?;
        let diff: Vec<f64> = a
            .values()
            .iter()
            .zip(b.values())
            .map(|(u, v)| u - v)
            .collect();
        let rel = rms(&diff) / signal;
        let limit = if p == Preset::Bp2 { 0.02 } else { 0.01 };
        ok &= rel <= limit;
        lines.push(format!("{p} {:.3}% (<= {}%)", 100.0 * rel, 100.0 * limit));
    }
    let secs = t0.elapsed().as_secs_f64();
    ok &= secs < 5.0;
    check(ok, format!("{} in {secs:.2}s", lines.join(", ")))
}

fn naive_dft(x: &[f64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(j, &v)| {
                    v * Complex64::from_polar(1.0, -2.0 * PI * ((j * k) % n) as f64 / n as f64)
                })
                .sum()
        })
        .collect()
}

fn dft_correctness() -> Outcome {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sizes = [7usize, 25, 64, 183, 193];
    let (mut worst, mut worst_parseval) = (0.0f64, 0.0f64);
    for case in 0..40 {
        let n = sizes[case % sizes.len()];
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-100.0..100.0)).collect();
        let fast = dft(&x).map_err(|e| e.to_string())?;
        let slow = naive_dft(&x);
        let scale = slow.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (a, b) in fast.bins().iter().zip(&slow) {
            worst = worst.max((a - b).norm() / scale);
        }
        let time: f64 = x.iter().map(|v| v * v).sum();
        let freq: f64 = fast.bins().iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        worst_parseval = worst_parseval.max((time - freq).abs() / time);
    }
    let secs = t0.elapsed().as_secs_f64();
    check(
        worst <= 1e-10 && worst_parseval <= 1e-9 && secs < 5.0,
        format!("40 cases: oracle rel err {worst:.2e} (<= 1e-10), Parseval {worst_parseval:.2e} (<= 1e-9), {secs:.2}s"),
    )
}

fn reconstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for n in [7usize, 8, 25, 64, 183, 193, 200] {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..80.0)).collect();
        let bank = magnitude_phase(&dft(&x).map_err(|e| e.to_string())?);
        let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (i, v) in x.iter().enumerate() {
            worst = worst.max((reconstruct(&bank, i as f64) - v).abs() / scale);
        }
    }
    check(
        worst <= 1e-8,
        format!("odd and even N, max rel err {worst:.2e} (<= 1e-8)"),
    )
}

fn derivative_oracles() -> Outcome {
    // Frequency-domain derivative on bin-frequency sinusoids.
    let mut fd_err = 0.0f64;
    for (n, k) in [(64usize, 5usize), (183, 26), (193, 40), (25, 4)] {
        let w = 2.0 * PI * k as f64 / n as f64;
        let x: Vec<f64> = (0..n).map(|i| 3.0 * (w * i as f64 + 0.7).cos()).collect();
        let d = frequency_domain_derivative(&x).map_err(|e| e.to_string())?;
        for (i, v) in d.iter().enumerate() {
            fd_err = fd_err.max((v + 3.0 * w * (w * i as f64 + 0.7).sin()).abs());
        }
    }
    // Central difference on polynomials up to degree 8.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut cd_err = 0.0f64;
    for degree in 0..=8usize {
        let c: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let p = |t: f64| {
            c.iter()
                .enumerate()
                .map(|(j, a)| a * (t / 10.0).powi(j as i32))
                .sum::<f64>()
        };
        let dp = |t: f64| {
            c.iter()
                .enumerate()
                .skip(1)
                .map(|(j, a)| a * j as f64 * (t / 10.0).powi(j as i32 - 1) / 10.0)
                .sum::<f64>()
        };
        let x: Vec<f64> = (0..40).map(|i| p(i as f64)).collect();
        let d = central_difference_8(&x).map_err(|e| e.to_string())?;
        let scale = (4..36).map(|n| dp(n as f64).abs()).fold(1e-300, f64::max);
        for (i, v) in d.iter().enumerate() {
            let n = (i + 4) as f64;
            cd_err = cd_err.max((v - dp(n)).abs() / scale.max(1.0));
        }
    }
    // First difference against x[n] - x[n-1].
    let x: Vec<f64> = (0..50).map(|_| rng.gen_range(-1e3..1e3)).collect();
    let d = first_difference(&x).map_err(|e| e.to_string())?;
    let exact = d.len() == 49 && d.iter().enumerate().all(|(i, v)| *v == x[i + 1] - x[i]);
    check(
        fd_err <= 1e-9 && cd_err <= 1e-9 && exact,
        format!("spectral {fd_err:.2e} (<= 1e-9), central8 deg<=8 {cd_err:.2e} (<= 1e-9), first difference exact: {exact}"),
    )
}

fn resynthesis_fidelity() -> Outcome {
    let n = 182;
    let parts = [(40.0, 7.0, 0.4), (18.0, 3.5, -1.2), (9.0, 7.0 / 3.0, 2.5)];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64;
            300.0
                + parts
                    .iter()
                    .map(|&(a, p, ph)| a * (2.0 * PI * t / p + ph).cos())
                    .sum::<f64>()
                + rng.gen_range(-0.5..0.5)
        })
        .collect();
    let s = DailySeries::new(NaiveDate::from_ymd_opt(2020, 5, 1).unwrap(), x, "synthetic").unwrap();
    let opts = ResynthOptions {
        window_days: n,
        step_minutes: 60,
        bin_width: 0,
    };
    let w = resynthesize(&s, &DEFAULT_PERIODS, opts).map_err(|e| e.to_string())?;
    let mut amp_err = 0.0f64;
    let mut phase_err = 0.0f64;
    for (c, &(a, _, ph)) in w.components().iter().zip(&parts) {
        amp_err = amp_err.max((c.amplitude / a - 1.0).abs());
        phase_err = phase_err.max(((c.phase - ph + PI).rem_euclid(2.0 * PI) - PI).abs());
    }
    // Leakage: a single 3.5-day tone must not show up in the other two bins.
    let tone: Vec<f64> = (0..n)
        .map(|i| 300.0 + 25.0 * (2.0 * PI * i as f64 / 3.5).cos())
        .collect();
    let s = DailySeries::new(NaiveDate::from_ymd_opt(2020, 5, 1).unwrap(), tone, "tone").unwrap();
    let w = resynthesize(&s, &DEFAULT_PERIODS, opts).map_err(|e| e.to_string())?;
    let amp = |k: usize| {
        w.components()
            .iter()
            .find(|c| c.bin == k)
            .map_or(0.0, |c| c.amplitude)
    };
    let leak = amp(26).max(amp(78)) / amp(52);
    check(
        amp_err <= 0.01 && phase_err <= 0.05 && leak < 0.01,
        format!("amplitude err {:.3}% (<= 1%), phase err {phase_err:.4} rad (<= 0.05), leakage {:.2e} (< 1%)", 100.0 * amp_err, leak),
    )
}

fn padding_contract() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 256,
        failure_persistence: None,
        ..Config::default()
    });
    let strategy = (
        prop::collection::vec(-100.0f64..1000.0, 14..120),
        0usize..60,
    );
    let result = runner.run(&strategy, |(x, pad_len)| {
        let v = pad_values(&x, pad_len).unwrap();
        let last = x.len() - 1;
        for d in 1..=pad_len {
            // Weekday anchors: the nearest two real days with the same weekday.
            let pos = last + d;
            let mut m = 1;
            while pos - 7 * m > last {
                m += 1;
            }
            let (a1, a2) = (pos - 7 * m, pos - 7 * (m + 1));
            let line = x[a1] + (x[a1] - x[a2]) * (pos - a1) as f64 / 7.0;
            let got = v[pad_len + pos];
            prop_assert!((got - line.max(0.0)).abs() <= 1e-9 * (1.0 + line.abs()));
            prop_assert!(got >= 0.0);
            prop_assert!(v[pad_len - d] >= 0.0);
        }
        // The leading pad mirrors the trailing construction.
        let rev: Vec<f64> = x.iter().rev().copied().collect();
        let mut mirrored = pad_values(&rev, pad_len).unwrap();
        mirrored.reverse();
        prop_assert_eq!(&mirrored, &v);
        let s =
            DailySeries::new(NaiveDate::from_ymd_opt(2021, 1, 1).unwrap(), x.clone(), "p").unwrap();
        let p = pad(&s, pad_len).unwrap();
        prop_assert_eq!(p.unpad(p.values()).unwrap(), s);
        Ok(())
    });
    match result {
        Ok(()) => {
            Ok("256 random series: weekday anchors, clamp at zero, pad/unpad identity".into())
        }
        Err(e) => Err(format!("property failed: {e}")),
    }
}

fn determinism() -> Outcome {
    let t0 = Instant::now();
    let bin = env!("CARGO_BIN_EXE_episignal");
    let deaths = fixture("national_deaths.csv");
    let wide = fixture("wide_cumulative.csv");
    let d = deaths.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec![
            "ingest",
            "--input",
            wide.to_str().unwrap(),
            "--format",
            "wide",
            "--mode",
            "cumulative",
            "--select",
            "Freedonia",
        ],
        vec!["smooth", "--input", d, "--preset", "lp1", "--method", "iir"],
        vec!["smooth", "--input", d, "--preset", "bp2", "--method", "fd"],
        vec![
            "smooth",
            "--input",
            d,
            "--preset",
            "hp1",
            "--method",
            "fd",
            "--brick-wall",
        ],
        vec!["smooth", "--input", d, "--method", "ma"],
        vec!["response", "--preset", "lp2", "--passes", "2"],
        vec!["response", "--derivative", "central8"],
        vec!["spectrum", "--input", d],
        vec!["spectrogram", "--input", d],
        vec!["resynth", "--input", d],
        vec!["derivative", "--input", d, "--derivative", "spectral"],
        vec![
            "smooth",
            "--input",
            d,
            "--preset",
            "lp1",
            "--method",
            "iir",
            "--output-format",
            "json",
        ],
    ];
    let mut bytes = 0;
    for args in &runs {
        let once = Command::new(bin)
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        let twice = Command::new(bin)
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        if !once.status.success() {
            return Err(format!(
                "{} failed: {}",
                args.join(" "),
                String::from_utf8_lossy(&once.stderr)
            ));
        }
        if once.stdout != twice.stdout {
            return Err(format!("{} differs between runs", args.join(" ")));
        }
        bytes += once.stdout.len();
    }
    let secs = t0.elapsed().as_secs_f64();
    check(
        secs < 10.0,
        format!(
            "{} invocations x2 byte-identical ({bytes} bytes), {secs:.2}s",
            runs.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("moving-average nulls", ma_nulls),
        ("moving-average phase inversion", ma_phase),
        ("elliptic template conformance", elliptic_templates),
        ("zero-phase property", zero_phase),
        ("method equivalence", method_equivalence),
        ("DFT correctness", dft_correctness),
        ("reconstruction identity", reconstruction),
        ("derivative oracles", derivative_oracles),
        ("resynthesis fidelity", resynthesis_fidelity),
        ("padding contract", padding_contract),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("AC{:<2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("AC{:<2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} acceptance criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
