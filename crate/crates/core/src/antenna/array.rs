use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use super::element::{element_gain, ElementPattern};
use crate::error::{Error, Result};
use crate::kv::KvFile;

/// Planar array on the y-z plane. Spacings are in wavelengths; element
/// `(h, v)` has index `h * vertical + v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub vertical: usize,
    pub horizontal: usize,
    pub dv: f64,
    pub dh: f64,
}

impl ArrayGeometry {
    pub fn ula(m: usize, dv: f64) -> Self {
        Self { vertical: m, horizontal: 1, dv, dh: 0.5 }
    }

    pub fn len(&self) -> usize {
        self.vertical * self.horizontal
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unit-modulus response towards elevation `elev`, azimuth `azim`.
    pub fn response(&self, elev: f64, azim: f64) -> Vec<Complex64> {
        let sy = elev.cos() * azim.sin();
        let sz = elev.sin();
        let mut out = Vec::with_capacity(self.len());
        for h in 0..self.horizontal {
            for v in 0..self.vertical {
                let phase = TAU * (h as f64 * self.dh * sy + v as f64 * self.dv * sz);
                out.push(Complex64::from_polar(1.0, phase));
            }
        }
        out
    }
}

/// Vertical uniform linear array with a fixed electrical downtilt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaConfig {
    pub m: usize,
    /// Element spacing (m).
    pub dv: f64,
    /// Wavelength (m).
    pub lambda: f64,
    /// Electrical tilt (rad); negative points below the horizon.
    pub tilt: f64,
    pub element: ElementPattern,
}

impl UlaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::invalid("M", "need at least one element"));
        }
        if !(self.dv > 0.0) {
            return Err(Error::invalid("dV", "spacing must be positive"));
        }
        if !(self.lambda > 0.0) {
            return Err(Error::invalid("lambda", "wavelength must be positive"));
        }
        self.element.validate()
    }

    /// Reads `M`, `dV_lambda`, `tilt_deg`, optional `wavelength` (m) and the
    /// element keys of [`ElementPattern::from_kv`].
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let lambda = kv.get_f64_or("wavelength", 0.15)?;
        let m: usize = kv.get("M")?;
        if m == 0 {
            return Err(Error::parse("M", "need at least one element"));
        }
        let dv = kv.get_f64_or("dV_lambda", 0.5)?;
        if !(dv > 0.0) {
            return Err(Error::parse("dV_lambda", "spacing must be positive"));
        }
        if !(lambda > 0.0) {
            return Err(Error::parse("wavelength", "must be positive"));
        }
        Ok(Self {
            m,
            dv: dv * lambda,
            lambda,
            tilt: kv.get_f64_or("tilt_deg", 0.0)?.to_radians(),
            element: ElementPattern::from_kv(kv)?,
        })
    }
}

/// Downtilt weights `w_m = exp(-j k (m-1) dV sin(tilt)) / sqrt(M)`.
pub fn ula_weights(cfg: &UlaConfig) -> Vec<Complex64> {
    let k = TAU / cfg.lambda;
    let norm = 1.0 / (cfg.m as f64).sqrt();
    (0..cfg.m)
        .map(|i| Complex64::from_polar(norm, -k * i as f64 * cfg.dv * cfg.tilt.sin()))
        .collect()
}

/// Array gain (dBi): element gain plus `20 log10 |sum_m w_m e^{j k (m-1) dV sin theta}|`.
pub fn array_gain(theta: f64, phi: f64, cfg: &UlaConfig) -> f64 {
    let k = TAU / cfg.lambda;
    let af: Complex64 = ula_weights(cfg)
        .iter()
        .enumerate()
        .map(|(i, w)| w * Complex64::from_polar(1.0, k * i as f64 * cfg.dv * theta.sin()))
        .sum();
    element_gain(theta, phi, &cfg.element) + 20.0 * af.norm().max(f64::MIN_POSITIVE).log10()
}

/// Planar array used for beam steering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UraConfig {
    pub geometry: ArrayGeometry,
    pub element: ElementPattern,
    /// Polarization count; carried for bookkeeping only.
    pub polarizations: usize,
}

impl UraConfig {
    /// Reads `M1` (vertical), `M2` (horizontal), `P`, `dV_lambda`,
    /// `dH_lambda` and element keys.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let vertical: usize = kv.get("M1")?;
        let horizontal: usize = kv.get("M2")?;
        if vertical == 0 || horizontal == 0 {
            return Err(Error::parse("M1", "array dimensions must be positive"));
        }
        Ok(Self {
            geometry: ArrayGeometry {
                vertical,
                horizontal,
                dv: kv.get_f64_or("dV_lambda", 0.5)?,
                dh: kv.get_f64_or("dH_lambda", 0.5)?,
            },
            element: ElementPattern::from_kv(kv)?,
            polarizations: kv.get_or("P", 1)?,
        })
    }

    /// Conjugate-match weights towards `(elev, azim)`, unit norm.
    pub fn steer(&self, elev: f64, azim: f64) -> Vec<Complex64> {
        let n = (self.geometry.len() as f64).sqrt();
        self.geometry.response(elev, azim).into_iter().map(|a| a.conj() / n).collect()
    }

    /// Gain (dBi) towards `(elev, azim)` with weights `w`.
    pub fn gain_db(&self, elev: f64, azim: f64, w: &[Complex64]) -> f64 {
        let af: Complex64 = self
            .geometry
            .response(elev, azim)
            .iter()
            .zip(w)
            .map(|(a, w)| a * w)
            .sum();
        element_gain(elev, azim, &self.element) + 10.0 * af.norm_sqr().max(f64::MIN_POSITIVE).log10()
    }

    /// Best gain over a codebook of steering directions.
    pub fn best_beam_gain_db(&self, elev: f64, azim: f64, codebook: &[(f64, f64)]) -> f64 {
        codebook
            .iter()
            .map(|&(e, a)| self.gain_db(elev, azim, &self.steer(e, a)))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Uniform codebook over elevation `[-pi/2, pi/2]` and azimuth `[-pi/2, pi/2]`.
    pub fn grid_codebook(n_elev: usize, n_azim: usize) -> Vec<(f64, f64)> {
        let lin = |n: usize, i: usize| if n <= 1 { 0.0 } else { -PI / 2.0 + PI * i as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(n_elev * n_azim);
        for i in 0..n_elev {
            for j in 0..n_azim {
                out.push((lin(n_elev, i), lin(n_azim, j)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ula(m: usize, tilt_deg: f64) -> UlaConfig {
        let tilt = tilt_deg.to_radians();
        UlaConfig {
            m,
            dv: 0.5,
            lambda: 1.0,
            tilt,
            element: ElementPattern { boresight_elev: tilt, ..Default::default() },
        }
    }

    #[test]
    fn weights_examples() {
        let w = ula_weights(&ula(8, 0.0));
        for x in &w {
            assert!((x.re - 1.0 / 8f64.sqrt()).abs() < 1e-15 && x.im.abs() < 1e-15);
        }
        let w = ula_weights(&ula(8, -10.0));
        let step = (w[1] / w[0]).arg();
        assert!((step - 0.5455).abs() < 1e-4, "{step}");
        assert!((step + PI * (-10f64).to_radians().sin()).abs() < 1e-12);
        let p: f64 = w.iter().map(|x| x.norm_sqr()).sum();
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_sum_at_tilt() {
        let cfg = ula(8, -10.0);
        let g = array_gain(cfg.tilt, 0.0, &cfg);
        assert!((g - (8.0 + 10.0 * 8f64.log10())).abs() < 1e-9);
    }

    fn vertical_cut(cfg: &UlaConfig) -> Vec<(f64, f64)> {
        (-900..=900)
            .map(|i| {
                let deg = i as f64 * 0.1;
                (deg, array_gain(deg.to_radians(), 0.0, cfg))
            })
            .collect()
    }

    #[test]
    fn argmax_at_tilt() {
        for m in [4, 8, 16] {
            let cut = vertical_cut(&ula(m, -10.0));
            let best = cut.iter().cloned().fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
            assert!((best.0 + 10.0).abs() <= 0.1 + 1e-9, "M={m}: {}", best.0);
        }
    }

    #[test]
    fn upper_side_lobes_decrease() {
        let cut = vertical_cut(&ula(8, -10.0));
        let peaks: Vec<f64> = cut
            .windows(3)
            .filter(|w| w[1].0 > -10.0 && w[1].1 > w[0].1 && w[1].1 >= w[2].1)
            .map(|w| w[1].1)
            .collect();
        assert!(peaks.len() >= 3);
        for p in peaks.windows(2) {
            assert!(p[1] < p[0], "{peaks:?}");
        }
    }

    #[test]
    fn ura_steering_gain() {
        let ura = UraConfig {
            geometry: ArrayGeometry { vertical: 8, horizontal: 4, dv: 0.5, dh: 0.5 },
            element: ElementPattern::default(),
            polarizations: 2,
        };
        let (e, a) = (-0.3, 0.4);
        let w = ura.steer(e, a);
        let g = ura.gain_db(e, a, &w);
        let want = element_gain(e, a, &ura.element) + 10.0 * 32f64.log10();
        assert!((g - want).abs() < 1e-9);
        assert!(ura.gain_db(0.5, -0.4, &w) < g);
        let cb = UraConfig::grid_codebook(5, 3);
        assert_eq!(cb.len(), 15);
        assert!(ura.best_beam_gain_db(e, a, &cb) <= g + 1e-9);
    }

    #[test]
    fn ula_geometry_matches_ula_weights() {
        let cfg = ula(4, -10.0);
        let geo = ArrayGeometry::ula(4, 0.5);
        let w = ula_weights(&cfg);
        let th = 0.2;
        let af: Complex64 = geo.response(th, 0.0).iter().zip(&w).map(|(a, w)| a * w).sum();
        let g = element_gain(th, 0.0, &cfg.element) + 20.0 * af.norm().log10();
        assert!((g - array_gain(th, 0.0, &cfg)).abs() < 1e-12);
    }
}
