//! 3GPP aerial-UE channel (LoS probability and path loss).
//!
//! The altitude-dependent coefficient tables are loaded from data files
//! shipped under `data/`; see [`TgppParams::builtin`]. The terrestrial LoS
//! tables and the path-loss formulas below follow the 3GPP reports and are
//! non-normative defaults.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kv::KvFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgppScenario {
    RMa,
    UMa,
    UMi,
}

impl FromStr for TgppScenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rma" => Ok(Self::RMa),
            "uma" => Ok(Self::UMa),
            "umi" => Ok(Self::UMi),
            _ => Err(Error::parse("scenario", format!("unknown scenario `{s}`"))),
        }
    }
}

/// `max(slope * log10(H) + intercept, floor)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogCoeff {
    pub slope: f64,
    pub intercept: f64,
    pub floor: f64,
}

impl LogCoeff {
    pub fn eval(&self, h: f64) -> f64 {
        (self.slope * h.log10() + self.intercept).max(self.floor)
    }
}

/// LoS probability for conventional terrestrial UEs, `f(d2D, h_UT)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TerrestrialLos {
    Uma,
    Umi,
    Rma,
    Constant(f64),
}

impl TerrestrialLos {
    pub fn eval(&self, d2d: f64, h_ut: f64) -> f64 {
        match *self {
            TerrestrialLos::Uma => {
                if d2d <= 18.0 {
                    return 1.0;
                }
                let c = if h_ut <= 13.0 {
                    0.0
                } else {
                    ((h_ut.min(23.0) - 13.0) / 10.0).powf(1.5)
                };
                (18.0 / d2d + (-d2d / 63.0).exp() * (1.0 - 18.0 / d2d))
                    * (1.0 + c * 1.25 * (d2d / 100.0).powi(3) * (-d2d / 150.0).exp())
            }
            TerrestrialLos::Umi => {
                if d2d <= 18.0 {
                    1.0
                } else {
                    18.0 / d2d + (-d2d / 36.0).exp() * (1.0 - 18.0 / d2d)
                }
            }
            TerrestrialLos::Rma => {
                if d2d <= 10.0 {
                    1.0
                } else {
                    (-(d2d - 10.0) / 1000.0).exp()
                }
            }
            TerrestrialLos::Constant(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TgppParams {
    pub scenario: TgppScenario,
    pub h1: f64,
    pub h2: f64,
    pub d1: LogCoeff,
    pub p1: LogCoeff,
    pub terrestrial: TerrestrialLos,
    pub bs_height: f64,
}

const UMA_PRESET: &str = include_str!("../../data/tgpp_uma.preset");
const RMA_PRESET: &str = include_str!("../../data/tgpp_rma.preset");
const UMI_PRESET: &str = include_str!("../../data/tgpp_umi.preset");

impl TgppParams {
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let scenario: TgppScenario = kv.get("scenario")?;
        let coeff = |prefix: &str| -> Result<LogCoeff> {
            Ok(LogCoeff {
                slope: kv.get_f64(&format!("{prefix}_slope"))?,
                intercept: kv.get_f64(&format!("{prefix}_intercept"))?,
                floor: kv.get_f64_or(&format!("{prefix}_floor"), f64::NEG_INFINITY)?,
            })
        };
        let terrestrial = match kv.raw("terrestrial").unwrap_or("uma") {
            "uma" => TerrestrialLos::Uma,
            "umi" => TerrestrialLos::Umi,
            "rma" => TerrestrialLos::Rma,
            other => match other.parse::<f64>() {
                Ok(p) if (0.0..=1.0).contains(&p) => TerrestrialLos::Constant(p),
                _ => return Err(Error::parse("terrestrial", format!("unknown table `{other}`"))),
            },
        };
        let p = Self {
            scenario,
            h1: kv.get_f64("h1")?,
            h2: kv.get_f64("h2")?,
            d1: coeff("d1")?,
            p1: coeff("p1")?,
            terrestrial,
            bs_height: kv.get_f64_or("bs_height", 25.0)?,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1.5 <= self.h1 && self.h1 < self.h2 && self.h2 <= 300.0) {
            return Err(Error::invalid("h1/h2", "require 1.5 <= H1 < H2 <= 300"));
        }
        Ok(())
    }

    /// Coefficients shipped with the crate for `scenario`.
    pub fn builtin(scenario: TgppScenario) -> Self {
        let text = match scenario {
            TgppScenario::UMa => UMA_PRESET,
            TgppScenario::RMa => RMA_PRESET,
            TgppScenario::UMi => UMI_PRESET,
        };
        Self::from_kv(&KvFile::parse(text).expect("builtin preset parses"))
            .expect("builtin preset is valid")
    }
}

/// LoS probability of a UE at altitude `h` and ground distance `d2d` from the
/// base station.
pub fn tgpp_los_probability(d2d: f64, h: f64, p: &TgppParams) -> Result<f64> {
    if !(1.5..=300.0).contains(&h) {
        return Err(Error::domain("H", h, "1.5 <= H <= 300 m"));
    }
    if h <= p.h1 {
        return Ok(p.terrestrial.eval(d2d, h));
    }
    if h >= p.h2 {
        return Ok(1.0);
    }
    let d1 = p.d1.eval(h);
    let p1 = p.p1.eval(h);
    if d2d <= d1 {
        Ok(1.0)
    } else {
        Ok(d1 / d2d + (-d2d / p1).exp() * (1.0 - d1 / d2d))
    }
}

/// Path loss (dB) and shadowing standard deviation (dB) for a link of 3D
/// length `d3d` to a UE at altitude `h`, carrier `fc_ghz`.
///
/// Non-normative: the terrestrial regime ignores the breakpoint distance, and
/// the distance is floored at 10 m.
pub fn tgpp_path_loss(d3d: f64, h: f64, los: bool, p: &TgppParams, fc_ghz: f64) -> (f64, f64) {
    let d = d3d.max(10.0);
    let ld = d.log10();
    let lf = fc_ghz.log10();
    let aerial = h > p.h1;
    match p.scenario {
        TgppScenario::UMa => {
            let pl_los = 28.0 + 22.0 * ld + 20.0 * lf;
            if los {
                let sigma = if aerial { 4.64 * (-0.0066 * h).exp() } else { 4.0 };
                (pl_los, sigma)
            } else if aerial {
                let hc = h.min(100.0);
                let pl = -17.5 + (46.0 - 7.0 * hc.log10()) * ld
                    + 20.0 * (40.0 * std::f64::consts::PI * fc_ghz / 3.0).log10();
                (pl.max(pl_los), 6.0)
            } else {
                let pl = 13.54 + 39.08 * ld + 20.0 * lf - 0.6 * (h - 1.5);
                (pl.max(pl_los), 6.0)
            }
        }
        TgppScenario::UMi => {
            let hc = h.max(1.5);
            let fspl = 32.45 + 20.0 * ld + 20.0 * lf;
            let pl_los = (30.9 + (22.25 - 0.5 * hc.log10()) * ld + 20.0 * lf).max(fspl);
            if los {
                ((pl_los), (5.0 * (-0.01 * h).exp()).max(2.0))
            } else {
                let pl = 32.4 + (43.2 - 7.6 * hc.log10()) * ld + 20.0 * lf;
                (pl.max(pl_los), 8.0)
            }
        }
        TgppScenario::RMa => {
            let hc = h.max(1.5);
            let f_term = 20.0 * (40.0 * std::f64::consts::PI * fc_ghz / 3.0).log10();
            let pl_los = (23.9 - 1.8 * hc.log10()).max(20.0) * ld + f_term;
            if los {
                (pl_los, 4.2 * (-0.0046 * h).exp())
            } else {
                let pl = -12.0 + (35.0 - 5.3 * hc.log10()) * ld + f_term;
                (pl.max(pl_los), 6.0)
            }
        }
    }
}
