use super::geometry::AngleUnit;
use crate::error::{Error, Result};
use crate::scalar::{to_db, Real};

/// Elevation-angle dependent probabilistic LoS model.
///
/// LoS links have gain `beta0 d^-alpha`, NLoS links `kappa beta0 d^-alpha`, and
/// the LoS probability is a logistic function of the elevation angle with
/// shape `(a, b)` fitted in `angle_unit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbLosParams<T> {
    pub a: T,
    pub b: T,
    pub kappa: T,
    pub beta0: T,
    pub alpha: T,
    pub angle_unit: AngleUnit,
}

impl<T: Real> ProbLosParams<T> {
    pub fn new(a: T, b: T, kappa: T, beta0: T, alpha: T, angle_unit: AngleUnit) -> Result<Self> {
        if !(a > T::zero()) {
            return Err(Error::invalid("a", "must be positive"));
        }
        if !(b > T::zero()) {
            return Err(Error::invalid("b", "must be positive"));
        }
        if !(kappa > T::zero() && kappa <= T::one()) {
            return Err(Error::invalid("kappa", "must lie in (0, 1]"));
        }
        if !(beta0 > T::zero()) {
            return Err(Error::invalid("beta0", "must be positive"));
        }
        if !(alpha > T::zero()) {
            return Err(Error::invalid("alpha", "must be positive"));
        }
        Ok(Self { a, b, kappa, beta0, alpha, angle_unit })
    }

    /// LoS probability at elevation `theta` (radians).
    pub fn p_los(&self, theta: T) -> T {
        los_probability(self.angle_unit.from_radians(theta), self.a, self.b)
    }

    /// Regularized LoS probability `P_LoS + (1 - P_LoS) kappa` at `theta` (radians).
    pub fn p_hat(&self, theta: T) -> T {
        regularized_los(self.p_los(theta), self.kappa)
    }
}

/// Logistic LoS probability `1 / (1 + a exp(-b (theta - a)))`, with `theta`
/// in the unit the parameters were fitted in.
pub fn los_probability<T: Real>(theta: T, a: T, b: T) -> T {
    T::one() / (T::one() + a * (-b * (theta - a)).exp())
}

/// `P + (1 - P) kappa`.
pub fn regularized_los<T: Real>(p_los: T, kappa: T) -> T {
    p_los + (T::one() - p_los) * kappa
}

/// Expected channel power `E|g|^2 = P_hat(theta) beta0 d^-alpha` for a UAV at
/// altitude `h` and ground distance `d2d`.
pub fn expected_gain<T: Real>(d2d: T, h: T, p: &ProbLosParams<T>) -> Result<T> {
    if d2d < T::zero() {
        return Err(Error::domain("d2D", d2d.to_f64_lossy(), "d2D >= 0"));
    }
    if !(h > T::zero()) {
        return Err(Error::domain("H", h.to_f64_lossy(), "H > 0"));
    }
    let d = d2d.hypot(h);
    let theta = h.atan2(d2d);
    Ok(p.p_hat(theta) * p.beta0 * d.powf(-p.alpha))
}

/// Expected path loss in dB, `-10 log10(E|g|^2)`.
pub fn expected_path_loss_db<T: Real>(d2d: T, h: T, p: &ProbLosParams<T>) -> Result<T> {
    Ok(-to_db(expected_gain(d2d, h, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::difference_sign_changes;

    fn fig12() -> ProbLosParams<f64> {
        ProbLosParams::new(10.0, 0.6, 0.01, 1e-5, 2.3, AngleUnit::Degrees).unwrap()
    }

    #[test]
    fn logistic_examples() {
        assert!((los_probability(10.0f64, 10.0, 0.6) - 1.0 / 11.0).abs() < 1e-15);
        let p90 = los_probability(90.0, 10.0, 0.6);
        assert!((1.0 - 1e-15..=1.0).contains(&p90));
        let p45: f64 = los_probability(45.0, 10.0, 0.6);
        let expected = 1.0 / (1.0 + 10.0 * (-21.0f64).exp());
        assert!((p45 - expected).abs() < 1e-15);
        assert!((p45 - (1.0 - 10.0 * (-21.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn logistic_monotone_on_grid() {
        let ys: Vec<f64> = (0..1000).map(|i| los_probability(i as f64 * 0.09, 10.0, 0.6)).collect();
        assert!(ys.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn kappa_one_is_pure_path_loss() {
        let p = ProbLosParams::new(10.0, 0.6, 1.0, 1e-5, 2.3, AngleUnit::Degrees).unwrap();
        for &(r, h) in &[(0.0, 50.0), (300.0, 100.0), (1500.0, 20.0)] {
            let g = expected_gain(r, h, &p).unwrap();
            let d: f64 = f64::hypot(r, h);
            assert!((g - 1e-5 * d.powf(-2.3)).abs() <= 1e-12 * g);
        }
    }

    #[test]
    fn overhead_gain() {
        let p = fig12();
        let g = expected_gain(0.0, 100.0, &p).unwrap();
        let phat = p.p_hat(std::f64::consts::FRAC_PI_2);
        assert!((g - phat * 1e-5 * 100f64.powf(-2.3)).abs() < 1e-20);
        assert!(expected_gain(0.0, 0.0, &p).is_err());
    }

    #[test]
    fn unimodal_in_altitude() {
        let p = fig12();
        for &r in &[200.0, 500.0, 1000.0] {
            let ys: Vec<f64> = (1..=2000)
                .map(|h| expected_gain(r, h as f64, &p).unwrap())
                .collect();
            assert!(difference_sign_changes(&ys) <= 1, "d2D = {r}");
            // rises first then falls
            assert!(ys[50] > ys[0]);
            assert!(ys[1999] < ys.iter().cloned().fold(0.0, f64::max));
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(ProbLosParams::new(0.0, 0.6, 0.1, 1.0, 2.0, AngleUnit::Degrees).is_err());
        assert!(ProbLosParams::new(1.0, 0.6, 1.5, 1.0, 2.0, AngleUnit::Degrees).is_err());
        assert!(ProbLosParams::new(1.0, 0.6, 0.0, 1.0, 2.0, AngleUnit::Degrees).is_err());
    }
}
