//! Spectral processing of daily-aggregated epidemiological time series.
//!
//! The crate covers ingestion of aggregated CSV data, weekday-aware padding,
//! Fourier analysis, numerical differentiation, moving-average and elliptic
//! filter design, zero-phase and frequency-domain filtering, sinusoidal
//! resynthesis of the weekly oscillations and derivative spectrograms.

pub mod apply;
pub mod cli;
pub mod derivative;
pub mod design;
pub mod error;
pub mod format;
pub mod ingest;
pub mod preprocess;
pub mod resynthesis;
pub mod series;
pub mod spectral;
pub mod spectrogram;

pub use error::{Error, Result};
pub use series::DailySeries;
