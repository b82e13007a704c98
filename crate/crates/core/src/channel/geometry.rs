use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Unit in which an empirical model's angle parameters were fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleUnit {
    #[default]
    Radians,
    Degrees,
}

impl AngleUnit {
    /// Converts an angle in radians into this unit.
    pub fn from_radians<T: Real>(self, rad: T) -> T {
        match self {
            AngleUnit::Radians => rad,
            AngleUnit::Degrees => rad.to_degrees(),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rad" | "radians" => Some(AngleUnit::Radians),
            "deg" | "degrees" => Some(AngleUnit::Degrees),
            _ => None,
        }
    }
}

/// Elevation of `uav` as seen from `gnd`, in radians, in `(-pi/2, pi/2]`.
pub fn elevation_angle<T: Real>(uav: &Vec3<T>, gnd: &Vec3<T>) -> Result<T> {
    let dh = uav.horizontal_distance(gnd);
    let dz = uav.z - gnd.z;
    if dh == T::zero() && dz == T::zero() {
        return Err(Error::CoincidentPoints);
    }
    Ok(dz.atan2(dh))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn examples() {
        let g = Vec3::new(0.0, 0.0, 0.0);
        assert_eq!(elevation_angle(&Vec3::new(0.0, 0.0, 100.0), &g).unwrap(), FRAC_PI_2);
        assert!((elevation_angle(&Vec3::new(100.0, 0.0, 100.0), &g).unwrap() - FRAC_PI_4).abs() < 1e-15);
        let t = elevation_angle(&Vec3::new(0.0, 1000.0, 100.0), &g).unwrap();
        assert!((t - 0.1f64.atan()).abs() < 1e-15);
        assert!((t - 0.0997).abs() < 1e-4);
    }

    #[test]
    fn coincident_rejected() {
        let p = Vec3::new(1.0f32, 2.0, 3.0);
        assert_eq!(elevation_angle(&p, &p), Err(Error::CoincidentPoints));
    }

    #[test]
    fn below_horizon_is_negative() {
        let t = elevation_angle(&Vec3::new(10.0, 0.0, 0.0), &Vec3::new(0.0, 0.0, 10.0)).unwrap();
        assert!((t + FRAC_PI_4).abs() < 1e-15);
    }
}
