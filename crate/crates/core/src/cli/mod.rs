//! Command-line front end. Every subcommand reads at most one series and
//! writes one table.

mod table;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::apply::{pipeline, InitialState, Method, PipelineOptions};
use crate::derivative::{differentiate, DerivativeMethod};
use crate::design::{frequency_response, response_grid, DigitalFilter, Preset};
use crate::error::Error;
use crate::ingest::{ingest, CountMode, IngestOptions, InputFormat};
use crate::preprocess::DEFAULT_PAD_DAYS;
use crate::resynthesis::{resynthesize, ResynthOptions};
use crate::series::DailySeries;
use crate::spectrogram::{sliding_spectrogram, windowed_derivative_spectrum, SpectrogramFrame};

pub use table::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "episignal",
    version,
    about = "Spectral processing of daily case and death counts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert an input file to a daily long CSV.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Pad, filter and unpad a series.
    Smooth {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Filter preset (lp1, lp2, hp1, bp1, bp2, ma7, identity).
        #[arg(long)]
        preset: Option<Preset>,
        #[arg(long, value_enum, default_value_t = MethodArg::Fd)]
        method: MethodArg,
        /// Use the ideal band mask of the preset pass band (fd only).
        #[arg(long)]
        brick_wall: bool,
        /// Synthetic days attached to each end.
        #[arg(long, default_value_t = DEFAULT_PAD_DAYS)]
        pad_days: usize,
        /// Start both recursive passes from zero state.
        #[arg(long)]
        zero_state: bool,
    },
    /// Frequency response of a filter preset or a differentiator.
    Response {
        #[command(flatten)]
        output: OutputArgs,
        #[arg(
            long,
            conflicts_with = "derivative",
            required_unless_present = "derivative"
        )]
        preset: Option<Preset>,
        /// Differentiator (first, central8, spectral).
        #[arg(long)]
        derivative: Option<DerivativeMethod>,
        /// 1 for a single pass, 2 for the forward-backward composite.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
        passes: u32,
        /// Uniform grid intervals on [0, 0.5].
        #[arg(long, default_value_t = 2048)]
        points: usize,
    },
    /// Normalized derivative spectrum of the most recent window.
    Spectrum {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 193)]
        window: usize,
        #[arg(long, default_value_t = 0.1)]
        band_low: f64,
        #[arg(long, default_value_t = 0.475)]
        band_high: f64,
    },
    /// Sliding-window normalized derivative spectra.
    Spectrogram {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 25)]
        window: usize,
        #[arg(long, default_value_t = 1)]
        hop: usize,
        /// Frames are normalized to their maximum above this frequency.
        #[arg(long, default_value_t = 0.1)]
        floor: f64,
    },
    /// Minute-resolution waveform of the weekly oscillations.
    Resynth {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value_t = 183)]
        window: usize,
        /// Comma-separated periods in days.
        #[arg(long, value_delimiter = ',', default_value = "7,3.5,2.333")]
        periods: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        step_minutes: u32,
        #[arg(long, default_value_t = 0)]
        bin_width: usize,
    },
    /// Numerical derivative of a series.
    Derivative {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        output: OutputArgs,
        #[arg(long, default_value = "spectral")]
        derivative: DerivativeMethod,
    },
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Input CSV path, or `-` for standard input.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Long)]
    format: FormatArg,
    #[arg(long, value_enum, default_value_t = ModeArg::Daily)]
    mode: ModeArg,
    /// Country/region to extract from a wide file.
    #[arg(long)]
    select: Option<String>,
    /// First date kept (YYYY-MM-DD).
    #[arg(long, requires = "to")]
    from: Option<NaiveDate>,
    /// Last date kept (YYYY-MM-DD).
    #[arg(long, requires = "from")]
    to: Option<NaiveDate>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output path; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    output_format: OutputFormat,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Wide,
    Long,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Cumulative,
    Daily,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Fd,
    Iir,
    Ma,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

/// A failure with its exit code and one-line message.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numeric() {
            EXIT_NUMERIC
        } else if matches!(
            e,
            Error::InvalidArgument(_)
                | Error::WrongFilterKind { .. }
                | Error::BinCollision { .. }
                | Error::InfeasibleSpec(_)
        ) {
            EXIT_USAGE
        } else {
            EXIT_DATA
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(what: &str, path: &std::path::Path, e: io::Error) -> Failure {
    Failure {
        code: EXIT_DATA,
        message: format!("{what} {}: {e}", path.display()),
    }
}

fn read_series(args: &InputArgs) -> Result<DailySeries, Failure> {
    let text = if args.input.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| io_failure("cannot read", &args.input, e))?;
        s
    } else {
        fs::read_to_string(&args.input).map_err(|e| io_failure("cannot read", &args.input, e))?
    };
    let opts = IngestOptions {
        format: match args.format {
            FormatArg::Wide => InputFormat::Wide,
            FormatArg::Long => InputFormat::Long,
        },
        mode: match args.mode {
            ModeArg::Cumulative => CountMode::Cumulative,
            ModeArg::Daily => CountMode::Daily,
        },
        selector: args.select.clone(),
        range: args.from.zip(args.to),
    };
    Ok(ingest(&text, &opts)?)
}

fn write_table(table: &Table, args: &OutputArgs) -> Result<(), Failure> {
    let text = match args.output_format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    };
    match &args.output {
        Some(path) => fs::write(path, text).map_err(|e| io_failure("cannot write", path, e)),
        None => {
            let mut out = io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(io_failure(
                    "cannot write",
                    std::path::Path::new("<stdout>"),
                    e,
                )),
                _ => Ok(()),
            }
        }
    }
}

fn date_cell(d: NaiveDate) -> Cell {
    Cell::Text(d.format("%Y-%m-%d").to_string())
}

fn series_table(s: &DailySeries) -> Table {
    dated_table(s.start_date(), s.values())
}

fn dated_table(start: NaiveDate, values: &[f64]) -> Table {
    let mut t = Table::new(vec!["date", "value"]);
    for (i, &v) in values.iter().enumerate() {
        t.push(vec![
            date_cell(start + chrono::Days::new(i as u64)),
            v.into(),
        ]);
    }
    t
}

fn frames_table(frames: &[SpectrogramFrame]) -> Table {
    let mut t = Table::new(vec!["window_start", "frequency", "magnitude"]);
    for f in frames {
        for (q, m) in f.frequencies.iter().zip(&f.normalized_magnitude) {
            t.push(vec![date_cell(f.window_start), (*q).into(), (*m).into()]);
        }
    }
    t
}

fn warn_zero_band(frames: &[SpectrogramFrame]) {
    if let Some(f) = frames.iter().find(|f| f.zero_band) {
        eprintln!(
            "episignal: warning: window starting {} has no energy in its normalization band; magnitudes left unnormalized",
            f.window_start
        );
    }
}

fn response_table(
    preset: Option<Preset>,
    derivative: Option<DerivativeMethod>,
    passes: u32,
    points: usize,
) -> Result<Table, Failure> {
    let mut t = Table::new(vec!["frequency", "magnitude_db", "phase"]);
    if let Some(p) = preset {
        let mut extra = vec![1.0 / 7.0, 2.0 / 7.0, 3.0 / 7.0];
        if let Some(spec) = p.spec() {
            let (lo, hi) = spec.passband();
            extra.extend([lo, hi]);
            for (a, b) in spec.stopbands() {
                extra.extend([a, b]);
            }
        }
        let grid = response_grid(points, &extra);
        let filter: DigitalFilter = p.build()?;
        let mut r = frequency_response(&filter, &grid)?;
        if passes == 2 {
            r = r.zero_phase_composite();
        }
        for ((f, m), ph) in grid.iter().zip(r.magnitude_db_floored()).zip(r.phase()) {
            t.push(vec![(*f).into(), m.into(), ph.into()]);
        }
    } else if let Some(d) = derivative {
        if passes != 1 {
            return Err(
                Error::InvalidArgument("--passes applies to filter presets only".into()).into(),
            );
        }
        let grid = response_grid(points, &[]);
        let mags = d.spectral_response(&grid)?;
        let phases = d.phase_response(&grid)?;
        for ((f, m), ph) in grid.iter().zip(mags).zip(phases) {
            let db = if m < crate::design::MAGNITUDE_FLOOR {
                crate::design::DB_FLOOR
            } else {
                20.0 * m.log10()
            };
            t.push(vec![(*f).into(), db.into(), ph.into()]);
        }
    }
    Ok(t)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ingest { input, output } => {
            let s = read_series(&input)?;
            write_table(&series_table(&s), &output)
        }
        Command::Smooth {
            input,
            output,
            preset,
            method,
            brick_wall,
            pad_days,
            zero_state,
        } => {
            let method = match method {
                MethodArg::Fd => Method::FrequencyDomain,
                MethodArg::Iir => Method::ZeroPhase,
                MethodArg::Ma => Method::MovingAverage,
            };
            let preset = match (preset, method) {
                (Some(p), _) => p,
                (None, Method::MovingAverage) => Preset::Ma7,
                (None, _) => {
                    return Err(Error::InvalidArgument(format!(
                        "--preset is required with --method {method}; valid presets: {}",
                        Preset::valid_names()
                    ))
                    .into())
                }
            };
            let s = read_series(&input)?;
            let opts = PipelineOptions {
                pad_len: pad_days,
                brick_wall,
                init: if zero_state {
                    InitialState::Zero
                } else {
                    InitialState::SteadyState
                },
            };
            let out = pipeline(&s, preset, method, opts)?;
            write_table(&series_table(&out), &output)
        }
        Command::Response {
            output,
            preset,
            derivative,
            passes,
            points,
        } => write_table(
            &response_table(preset, derivative, passes, points)?,
            &output,
        ),
        Command::Spectrum {
            input,
            output,
            window,
            band_low,
            band_high,
        } => {
            let s = read_series(&input)?;
            let frame = windowed_derivative_spectrum(&s, window, (band_low, band_high))?;
            let frames = [frame];
            warn_zero_band(&frames);
            write_table(&frames_table(&frames), &output)
        }
        Command::Spectrogram {
            input,
            output,
            window,
            hop,
            floor,
        } => {
            let s = read_series(&input)?;
            let frames = sliding_spectrogram(&s, window, hop, floor)?;
            warn_zero_band(&frames);
            write_table(&frames_table(&frames), &output)
        }
        Command::Resynth {
            input,
            output,
            window,
            periods,
            step_minutes,
            bin_width,
        } => {
            let s = read_series(&input)?;
            let opts = ResynthOptions {
                window_days: window,
                step_minutes,
                bin_width,
            };
            let w = resynthesize(&s, &periods, opts)?;
            let mut t = Table::new(vec!["timestamp", "value"]);
            for (i, &v) in w.samples().iter().enumerate() {
                t.push(vec![
                    Cell::Text(w.instant(i).format("%Y-%m-%dT%H:%M").to_string()),
                    v.into(),
                ]);
            }
            write_table(&t, &output)
        }
        Command::Derivative {
            input,
            output,
            derivative,
        } => {
            let s = read_series(&input)?;
            let d = differentiate(derivative, s.values())?;
            // Align each output with the day it describes.
            let offset = match derivative {
                DerivativeMethod::FirstDifference => 1,
                DerivativeMethod::CentralDifference8 => 4,
                DerivativeMethod::FrequencyDomain => 0,
            };
            write_table(&dated_table(s.date_at(offset), &d), &output)
        }
    }
}

/// Runs the tool on `args` (program name first) and returns the exit code.
/// Diagnostics go to standard error as a single line.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            let rendered = e.to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            eprintln!("episignal: {}", first.trim_start_matches("error: "));
            return EXIT_USAGE;
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("episignal: error: {}", f.message);
            f.code
        }
    }
}
