use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two-lobe base-station pattern: `g_main` inside the closed interval
/// `[tilt - beamwidth/2, tilt + beamwidth/2]`, `g_side` elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLobeBs<T> {
    pub g_main: T,
    pub g_side: T,
    pub beamwidth: T,
    pub tilt: T,
}

impl<T: Real> TwoLobeBs<T> {
    pub fn new(g_main: T, g_side: T, beamwidth: T, tilt: T) -> Result<Self> {
        if !(g_side > T::zero() && g_main >= g_side) {
            return Err(Error::invalid("g_main/g_side", "require g_main >= g_side > 0"));
        }
        if !(beamwidth > T::zero()) {
            return Err(Error::invalid("beamwidth", "must be positive"));
        }
        Ok(Self { g_main, g_side, beamwidth, tilt })
    }
}

/// Linear gain towards elevation `theta`; omnidirectional in azimuth.
pub fn two_lobe_bs_gain<T: Real>(theta: T, p: &TwoLobeBs<T>) -> T {
    let half = p.beamwidth / T::lit(2.0);
    if theta >= p.tilt - half && theta <= p.tilt + half {
        p.g_main
    } else {
        p.g_side
    }
}

/// Nadir-pointing UAV antenna with half-beamwidth `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLobeUav<T> {
    pub psi: T,
    pub g_side: T,
}

impl<T: Real> TwoLobeUav<T> {
    pub fn new(psi: T, g_side: T) -> Result<Self> {
        if !(psi > T::zero() && psi < T::FRAC_PI_2()) {
            return Err(Error::invalid("Psi", "half-beamwidth must lie in (0, pi/2)"));
        }
        if !(g_side > T::zero()) {
            return Err(Error::invalid("g_side", "must be positive"));
        }
        Ok(Self { psi, g_side })
    }

    pub fn main_gain(&self) -> T {
        uav_main_gain(self.psi)
    }
}

/// Main-lobe gain `2.285 / psi^2`.
pub fn uav_main_gain<T: Real>(psi: T) -> T {
    T::lit(2.285) / (psi * psi)
}

/// Gain towards a ground point at horizontal offset `r` from a UAV at altitude `h`.
pub fn two_lobe_uav_gain<T: Real>(r: T, h: T, p: &TwoLobeUav<T>) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::domain("H", h.to_f64_lossy(), "H > 0"));
    }
    Ok(if r.abs() <= h * p.psi.tan() { p.main_gain() } else { p.g_side })
}
