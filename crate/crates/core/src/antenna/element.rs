use crate::error::{Error, Result};
use crate::kv::KvFile;

/// Directional element with a parabolic-in-dB pattern.
///
/// Angles are radians. Elevation is measured from the horizon (positive up),
/// azimuth from the element boresight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementPattern {
    pub theta3db: f64,
    pub phi3db: f64,
    pub max_gain_db: f64,
    /// Total attenuation cap.
    pub front_back_db: f64,
    /// Vertical-cut attenuation cap.
    pub sla_db: f64,
    /// Elevation of the element boresight.
    pub boresight_elev: f64,
}

impl Default for ElementPattern {
    fn default() -> Self {
        Self {
            theta3db: 65f64.to_radians(),
            phi3db: 65f64.to_radians(),
            max_gain_db: 8.0,
            front_back_db: 30.0,
            sla_db: 30.0,
            boresight_elev: 0.0,
        }
    }
}

impl ElementPattern {
    pub fn validate(&self) -> Result<()> {
        let pi = std::f64::consts::PI;
        if !(self.theta3db > 0.0 && self.theta3db < pi) {
            return Err(Error::invalid("theta3dB", "beamwidth must lie in (0, pi)"));
        }
        if !(self.phi3db > 0.0 && self.phi3db < pi) {
            return Err(Error::invalid("phi3dB", "beamwidth must lie in (0, pi)"));
        }
        if !(self.front_back_db >= 0.0 && self.sla_db >= 0.0) {
            return Err(Error::invalid("front_back_dB", "attenuation caps must be non-negative"));
        }
        Ok(())
    }

    /// Reads `theta3dB_deg`, `phi3dB_deg`, `max_gain_dB`, `front_back_dB`,
    /// `sla_dB` and `element_boresight_deg`; missing keys keep their defaults.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let d = Self::default();
        let e = Self {
            theta3db: kv.get_f64_or("theta3dB_deg", d.theta3db.to_degrees())?.to_radians(),
            phi3db: kv.get_f64_or("phi3dB_deg", d.phi3db.to_degrees())?.to_radians(),
            max_gain_db: kv.get_f64_or("max_gain_dB", d.max_gain_db)?,
            front_back_db: kv.get_f64_or("front_back_dB", d.front_back_db)?,
            sla_db: kv.get_f64_or("sla_dB", d.sla_db)?,
            boresight_elev: kv.get_f64_or("element_boresight_deg", 0.0)?.to_radians(),
        };
        e.validate().map_err(|err| match err {
            Error::InvalidParameter { name, reason } => Error::parse(format!("{name}_deg"), reason),
            other => other,
        })?;
        Ok(e)
    }
}

fn wrap_pi(x: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let y = (x + std::f64::consts::PI).rem_euclid(tau) - std::f64::consts::PI;
    if y == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        y
    }
}

/// Element gain in dBi at elevation `theta` and azimuth `phi`.
pub fn element_gain(theta: f64, phi: f64, e: &ElementPattern) -> f64 {
    let dt = (theta - e.boresight_elev) / e.theta3db;
    let dp = wrap_pi(phi) / e.phi3db;
    let av = (12.0 * dt * dt).min(e.sla_db);
    let ah = (12.0 * dp * dp).min(e.front_back_db);
    e.max_gain_db - (av + ah).min(e.front_back_db)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_half_power_and_floor() {
        let e = ElementPattern::default();
        assert_eq!(element_gain(0.0, 0.0, &e), 8.0);
        let g = element_gain(e.theta3db / 2.0, 0.0, &e);
        assert!((g - 5.0).abs() < 1e-12);
        let g = element_gain(0.0, e.phi3db / 2.0, &e);
        assert!((g - 5.0).abs() < 1e-12);
        assert_eq!(element_gain(0.0, std::f64::consts::PI, &e), 8.0 - 30.0);
        assert_eq!(element_gain(-1.5, 2.0, &e), 8.0 - 30.0);
    }

    #[test]
    fn azimuth_wraps() {
        let e = ElementPattern::default();
        let a = element_gain(0.1, 0.3, &e);
        let b = element_gain(0.1, 0.3 + std::f64::consts::TAU, &e);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn tilted_boresight() {
        let e = ElementPattern { boresight_elev: -0.2, ..Default::default() };
        assert_eq!(element_gain(-0.2, 0.0, &e), 8.0);
        assert!(element_gain(0.0, 0.0, &e) < 8.0);
    }

    #[test]
    fn from_kv_names_bad_key() {
        let kv = KvFile::parse("theta3dB_deg = 200\n").unwrap();
        match ElementPattern::from_kv(&kv) {
            Err(Error::Parse { key, .. }) => assert_eq!(key, "theta3dB_deg"),
            other => panic!("{other:?}"),
        }
    }
}
