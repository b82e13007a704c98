use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};

/// Unit-power small-scale fading `g~` with `E|g~|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SmallScaleModel {
    #[default]
    None,
    Rayleigh,
    /// Rician with linear K-factor.
    Rician(f64),
    /// Nakagami-m.
    Nakagami(f64),
}

impl SmallScaleModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SmallScaleModel::Rician(k) if !(k >= 0.0 && k.is_finite()) => {
                Err(Error::invalid("K", "Rician factor must be finite and >= 0"))
            }
            SmallScaleModel::Nakagami(m) if !(m >= 0.5 && m.is_finite()) => {
                Err(Error::invalid("m", "Nakagami shape must be finite and >= 0.5"))
            }
            _ => Ok(()),
        }
    }

    /// Parses `none`, `rayleigh`, `rician:K` or `nakagami:m`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.to_string(), Some(a.to_string())),
            None => (s.clone(), None),
        };
        let num = |a: Option<String>| -> Result<f64> {
            a.ok_or_else(|| Error::parse("fading", format!("`{kind}` needs a parameter")))?
                .trim()
                .parse()
                .map_err(|_| Error::parse("fading", "bad numeric parameter"))
        };
        let m = match kind.as_str() {
            "none" => SmallScaleModel::None,
            "rayleigh" => SmallScaleModel::Rayleigh,
            "rician" => SmallScaleModel::Rician(num(arg)?),
            "nakagami" => SmallScaleModel::Nakagami(num(arg)?),
            _ => return Err(Error::parse("fading", format!("unknown model `{s}`"))),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        match *self {
            SmallScaleModel::None => Complex64::new(1.0, 0.0),
            SmallScaleModel::Rayleigh => cn01(rng),
            SmallScaleModel::Rician(k) => {
                let los = (k / (k + 1.0)).sqrt();
                los + cn01(rng) * (1.0 / (k + 1.0)).sqrt()
            }
            SmallScaleModel::Nakagami(m) => {
                let power = Gamma::new(m, 1.0 / m).expect("validated shape").sample(rng);
                let phase = rng.random::<f64>() * std::f64::consts::TAU;
                Complex64::from_polar(f64::sqrt(power), phase)
            }
        }
    }
}

/// Circularly-symmetric complex Gaussian with unit variance.
pub(crate) fn cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
