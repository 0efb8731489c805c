use std::fmt;
use std::str::FromStr;

use super::{
    design_elliptic, moving_average, BandEdges, DigitalFilter, FilterDesignSpec, SosFilter,
};
use crate::error::{Error, Result};

const RIPPLE_DB: f64 = 0.01;
const ATTENUATION_DB: f64 = 40.0;

/// Named filters used by the smoothing and isolation pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Low-pass, pass 1/9, stop 1/8.
    Lp1,
    /// Low-pass, pass 1/21, stop 1/19.
    Lp2,
    /// High-pass, pass 1/7, stop 1/8.
    Hp1,
    /// Band-pass, pass [1/8, 1/6], stop [1/9, 1/5].
    Bp1,
    /// Band-pass, pass [1/19, 1/9], stop [1/21, 1/8].
    Bp2,
    /// Seven-day centered moving average.
    Ma7,
    /// Pass-through.
    Identity,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Lp1,
        Preset::Lp2,
        Preset::Hp1,
        Preset::Bp1,
        Preset::Bp2,
        Preset::Ma7,
        Preset::Identity,
    ];

    pub const ELLIPTIC: [Preset; 5] = [
        Preset::Lp1,
        Preset::Lp2,
        Preset::Hp1,
        Preset::Bp1,
        Preset::Bp2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Lp1 => "lp1",
            Preset::Lp2 => "lp2",
            Preset::Hp1 => "hp1",
            Preset::Bp1 => "bp1",
            Preset::Bp2 => "bp2",
            Preset::Ma7 => "ma7",
            Preset::Identity => "identity",
        }
    }

    /// Design template of the elliptic presets.
    pub fn spec(self) -> Option<FilterDesignSpec> {
        let edges = match self {
            Preset::Lp1 => BandEdges::LowPass {
                pass: 1.0 / 9.0,
                stop: 1.0 / 8.0,
            },
            Preset::Lp2 => BandEdges::LowPass {
                pass: 1.0 / 21.0,
                stop: 1.0 / 19.0,
            },
            Preset::Hp1 => BandEdges::HighPass {
                pass: 1.0 / 7.0,
                stop: 1.0 / 8.0,
            },
            Preset::Bp1 => BandEdges::BandPass {
                pass: [1.0 / 8.0, 1.0 / 6.0],
                stop: [1.0 / 9.0, 1.0 / 5.0],
            },
            Preset::Bp2 => BandEdges::BandPass {
                pass: [1.0 / 19.0, 1.0 / 9.0],
                stop: [1.0 / 21.0, 1.0 / 8.0],
            },
            Preset::Ma7 | Preset::Identity => return None,
        };
        Some(FilterDesignSpec {
            edges,
            passband_ripple_db: RIPPLE_DB,
            stopband_attenuation_db: ATTENUATION_DB,
        })
    }

    /// The pass band `[low, high]` in cycles/day. The moving average and the
    /// identity report the whole axis.
    pub fn passband(self) -> (f64, f64) {
        self.spec().map_or((0.0, 0.5), |s| s.passband())
    }

    pub fn build(self) -> Result<DigitalFilter> {
        match self {
            Preset::Ma7 => moving_average(7),
            Preset::Identity => Ok(DigitalFilter::Iir(SosFilter::identity())),
            elliptic => {
                let spec = elliptic.spec().expect("elliptic presets carry a spec");
                Ok(DigitalFilter::Iir(design_elliptic(&spec)?))
            }
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.map(Preset::name).join(", ")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|p| p.name() == wanted)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown preset '{s}'; valid presets: {}",
                    Self::valid_names()
                ))
            })
    }
}
