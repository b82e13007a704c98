use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::geometry::AngleUnit;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Log-distance model: `PL(d) = 10 alpha log10(d) + X0 + X_sigma` (dB).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDistanceParams<T> {
    pub alpha: T,
    pub x0_db: T,
    pub sigma_db: T,
}

impl<T: Real> LogDistanceParams<T> {
    pub fn new(alpha: T, x0_db: T, sigma_db: T) -> Result<Self> {
        if !(alpha > T::zero()) {
            return Err(Error::invalid("alpha", "path-loss exponent must be positive"));
        }
        if !(sigma_db >= T::zero()) {
            return Err(Error::invalid("sigma_db", "shadowing std must be non-negative"));
        }
        Ok(Self { alpha, x0_db, sigma_db })
    }

    /// Free-space equivalent for wavelength `lambda`: `alpha = 2`, `X0 = -10 log10((lambda / 4 pi)^2)`.
    pub fn free_space(lambda: T) -> Self {
        let beta0 = (lambda / (T::lit(4.0) * T::PI())).powi(2);
        Self {
            alpha: T::lit(2.0),
            x0_db: -crate::scalar::to_db(beta0),
            sigma_db: T::zero(),
        }
    }
}

/// Path loss in dB at distance `d >= 1` m with a given shadowing realization.
pub fn log_distance_pl<T: Real>(d: T, p: &LogDistanceParams<T>, shadow_db: T) -> Result<T> {
    if !(d >= T::one()) {
        return Err(Error::domain("d", d.to_f64_lossy(), "d >= 1 m (reference distance)"));
    }
    Ok(T::lit(10.0) * p.alpha * d.log10() + p.x0_db + shadow_db)
}

/// Free-space channel power gain `(lambda / (4 pi d))^2`.
pub fn free_space_gain<T: Real>(d: T, lambda: T) -> Result<T> {
    if !(d > T::zero()) {
        return Err(Error::domain("d", d.to_f64_lossy(), "d > 0"));
    }
    if !(lambda > T::zero()) {
        return Err(Error::domain("lambda", lambda.to_f64_lossy(), "lambda > 0"));
    }
    Ok((lambda / (T::lit(4.0) * T::PI() * d)).powi(2))
}

/// Altitude-dependent path-loss exponent `max(p1 - p2 log10(H), 2)`.
pub fn altitude_alpha<T: Real>(h: T, p1: T, p2: T) -> T {
    (p1 - p2 * h.log10()).max(T::lit(2.0))
}

/// Excess aerial path-loss parameters.
///
/// `eta(theta) = A (theta - theta0) exp(-(theta - theta0) / B) + eta0` and
/// `sigma_U^2(theta) = a_sh theta + sigma0`, with angles expressed in
/// `angle_unit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcessPlParams<T> {
    pub a: T,
    pub b: T,
    pub theta0: T,
    pub eta0: T,
    pub a_sh: T,
    pub sigma0: T,
    pub angle_unit: AngleUnit,
}

impl<T: Real> ExcessPlParams<T> {
    pub fn new(a: T, b: T, theta0: T, eta0: T, a_sh: T, sigma0: T, angle_unit: AngleUnit) -> Result<Self> {
        if b == T::zero() || !b.is_finite() {
            return Err(Error::invalid("B", "must be finite and non-zero"));
        }
        Ok(Self { a, b, theta0, eta0, a_sh, sigma0, angle_unit })
    }
}

/// Excess aerial path loss `eta(theta)` in dB; `theta` in radians.
pub fn excess_eta<T: Real>(theta: T, p: &ExcessPlParams<T>) -> T {
    let t = p.angle_unit.from_radians(theta) - p.theta0;
    p.a * t * (-t / p.b).exp() + p.eta0
}

/// Excess shadowing variance `sigma_U^2(theta)` (dB^2); `theta` in radians.
pub fn excess_shadow_variance<T: Real>(theta: T, p: &ExcessPlParams<T>) -> Result<T> {
    let v = p.a_sh * p.angle_unit.from_radians(theta) + p.sigma0;
    if v < T::zero() {
        return Err(Error::invalid(
            "a_sh/sigma0",
            format!("excess shadowing variance is negative ({})", v.to_f64_lossy()),
        ));
    }
    Ok(v)
}

/// One draw of `PL_ter(d) + eta(theta) + X_U(theta)` in dB.
///
/// `d` is the ground distance between the base station and the point beneath
/// the UAV; the terrestrial shadowing term of `ter` is drawn as well.
pub fn excess_pl<R: Rng + ?Sized>(
    theta: f64,
    d: f64,
    ter: &LogDistanceParams<f64>,
    p: &ExcessPlParams<f64>,
    rng: &mut R,
) -> Result<f64> {
    let var = excess_shadow_variance(theta, p)?;
    let z_ter: f64 = StandardNormal.sample(rng);
    let z_u: f64 = StandardNormal.sample(rng);
    let pl_ter = log_distance_pl(d, ter, ter.sigma_db * z_ter)?;
    Ok(pl_ter + excess_eta(theta, p) + var.sqrt() * z_u)
}

/// Direction-of-travel corrected path loss `PL_ter(d) + xi F`, `xi = -1` when
/// flying towards the ground station.
pub fn direction_adjusted_pl<T: Real>(d: T, toward: bool, f_db: T, ter: &LogDistanceParams<T>) -> Result<T> {
    if !(f_db >= T::zero()) {
        return Err(Error::invalid("F", "adjustment factor must be non-negative"));
    }
    let xi = if toward { -T::one() } else { T::one() };
    Ok(log_distance_pl(d, ter, T::zero())? + xi * f_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn ld(alpha: f64, x0: f64) -> LogDistanceParams<f64> {
        LogDistanceParams::new(alpha, x0, 0.0).unwrap()
    }

    #[test]
    fn log_distance_examples() {
        assert_eq!(log_distance_pl(1.0, &ld(2.3, 50.0), 0.0).unwrap(), 50.0);
        assert!((log_distance_pl(100.0, &ld(2.3, 50.0), 0.0).unwrap() - 96.0).abs() < 1e-12);
        let d = 1000f64.hypot(100.0);
        let pl = log_distance_pl(d, &ld(2.3, 50.0), 0.0).unwrap();
        assert!((pl - 119.05).abs() < 0.01, "{pl}");
        assert!(log_distance_pl(0.5, &ld(2.3, 50.0), 0.0).is_err());
    }

    #[test]
    fn free_space_examples() {
        let lambda = 0.125;
        let b0 = (lambda / (4.0 * std::f64::consts::PI)).powi(2);
        assert!((free_space_gain(1.0, lambda).unwrap() - b0).abs() < 1e-18);
        let r = free_space_gain(20.0, lambda).unwrap() / free_space_gain(10.0, lambda).unwrap();
        assert!((r - 0.25).abs() < 1e-14);
        assert!(free_space_gain(0.0, lambda).is_err());
    }

    #[test]
    fn altitude_alpha_examples() {
        assert_eq!(altitude_alpha(10.0, 4.0, 1.0), 3.0);
        assert_eq!(altitude_alpha(10000.0, 4.0, 1.0), 2.0);
        assert_eq!(altitude_alpha(1e12f32, 4.0, 1.0), 2.0);
    }

    #[test]
    fn excess_examples() {
        let p = ExcessPlParams::new(-2.0, 10.0, 0.3, 5.0, 0.1, 1.0, AngleUnit::Radians).unwrap();
        assert_eq!(excess_eta(0.3, &p), 5.0);
        assert!((excess_shadow_variance(2.0f64, &p).unwrap() - 1.2).abs() < 1e-15);
        let bad = ExcessPlParams { a_sh: -1.0, ..p };
        assert!(excess_shadow_variance(2.0, &bad).is_err());
        assert!(ExcessPlParams::new(1.0, 0.0, 0.0, 0.0, 0.0, 1.0, AngleUnit::Radians).is_err());
    }

    #[test]
    fn excess_eta_dips_then_rises_for_negative_a() {
        let p = ExcessPlParams::new(-3.0, 20.0, 0.0, 10.0, 0.0, 1.0, AngleUnit::Degrees).unwrap();
        let ys: Vec<f64> = (0..=90).map(|d| excess_eta((d as f64).to_radians(), &p)).collect();
        let argmin = ys
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(argmin > 0 && argmin < 90);
        assert_eq!(crate::numerics::difference_sign_changes(&ys), 1);
    }

    #[test]
    fn excess_pl_mean_matches_deterministic_part() {
        let ter = LogDistanceParams::new(3.0, 40.0, 4.0).unwrap();
        let p = ExcessPlParams::new(-1.0, 5.0, 0.2, 3.0, 0.5, 2.0, AngleUnit::Radians).unwrap();
        let mut rng = stream(3, &[]);
        let n = 20000;
        let mean: f64 = (0..n)
            .map(|_| excess_pl(0.4, 200.0, &ter, &p, &mut rng).unwrap())
            .sum::<f64>()
            / n as f64;
        let expected = log_distance_pl(200.0, &ter, 0.0).unwrap() + excess_eta(0.4, &p);
        assert!((mean - expected).abs() < 0.1, "{mean} vs {expected}");
    }

    #[test]
    fn direction_adjustment() {
        let ter = ld(2.0, 40.0);
        let base = log_distance_pl(50.0, &ter, 0.0).unwrap();
        assert_eq!(direction_adjusted_pl(50.0, true, 0.0, &ter).unwrap(), base);
        let to = direction_adjusted_pl(50.0, true, 2.0, &ter).unwrap();
        let away = direction_adjusted_pl(50.0, false, 2.0, &ter).unwrap();
        assert!((to - (base - 2.0)).abs() < 1e-12);
        assert!(((away - to) - 4.0).abs() < 1e-12);
        assert!(direction_adjusted_pl(50.0, true, -1.0, &ter).is_err());
    }
}
