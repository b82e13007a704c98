use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Which distance variable the rate lower bound is linearized in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SurrogateMode {
    #[default]
    Distance,
    DistanceSq,
}

impl FromStr for SurrogateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "distance" => Ok(Self::Distance),
            "distance_sq" | "distance_square" => Ok(Self::DistanceSq),
            other => Err(Error::parse("surrogate", format!("unknown surrogate `{other}`"))),
        }
    }
}

/// `log2(1 + gamma / d^alpha)` as a function of the distance `d`.
#[inline]
pub fn rate_at_distance<T: Real>(d: T, gamma: T, alpha: T) -> T {
    (gamma / d.powf(alpha)).ln_1p() / T::LN_2()
}

/// Value `A` and slope `B` of the rate lower bound at the local point, in the
/// variable selected by `mode` (distance or squared distance).
pub fn surrogate_coefficients<T: Real>(d_local: T, gamma: T, alpha: T, mode: SurrogateMode) -> (T, T) {
    let a = rate_at_distance(d_local, gamma, alpha);
    let da = d_local.powf(alpha);
    let b = alpha * gamma / (T::LN_2() * d_local * (da + gamma));
    match mode {
        SurrogateMode::Distance => (a, b),
        SurrogateMode::DistanceSq => (a, b / (T::lit(2.0) * d_local)),
    }
}

/// Concave lower bound on the rate at `q`, tight at `q_local`.
pub fn rate_surrogate<T: Real>(q: &Vec3<T>, w: &Vec3<T>, gamma: T, alpha: T, q_local: &Vec3<T>, mode: SurrogateMode) -> T {
    let dl = q_local.distance(w);
    let (a, b) = surrogate_coefficients(dl, gamma, alpha, mode);
    match mode {
        SurrogateMode::Distance => a - b * (q.distance(w) - dl),
        SurrogateMode::DistanceSq => a - b * ((*q - *w).norm_sq() - dl * dl),
    }
}

/// Gradient of [`rate_surrogate`] with respect to `q`.
pub fn rate_surrogate_grad<T: Real>(q: &Vec3<T>, w: &Vec3<T>, gamma: T, alpha: T, q_local: &Vec3<T>, mode: SurrogateMode) -> Vec3<T> {
    let dl = q_local.distance(w);
    let (_, b) = surrogate_coefficients(dl, gamma, alpha, mode);
    let r = *q - *w;
    match mode {
        SurrogateMode::Distance => {
            let d = r.norm();
            if d == T::zero() {
                Vec3::zero()
            } else {
                r * (-b / d)
            }
        }
        SurrogateMode::DistanceSq => r * (-T::lit(2.0) * b),
    }
}

/// Affine lower bound `|v_l|^2 + 2 v_l . (v - v_l)` on `|v|^2`.
pub fn minspeed_surrogate<T: Real>(v: &Vec3<T>, v_local: &Vec3<T>) -> T {
    v_local.norm_sq() + T::lit(2.0) * v_local.dot(&(*v - *v_local))
}

/// Affine lower bound `|q_l - c| + u . (q - q_l)` on `|q - c|`, with `u` the
/// unit vector from `c` to `q_l`.
pub fn distance_surrogate<T: Real>(q: &Vec3<T>, c: &Vec3<T>, q_local: &Vec3<T>) -> T {
    let r = *q_local - *c;
    let d = r.norm();
    d + r.dot(&(*q - *q_local)) / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fig14_local_value() {
        let w = Vec3::new(0.0, 0.0, 0.0);
        let ql = Vec3::new(0.0, 400.0, 100.0);
        for mode in [SurrogateMode::Distance, SurrogateMode::DistanceSq] {
            let v = rate_surrogate(&ql, &w, 1e6, 2.3, &ql, mode);
            assert!((v - 0.975f64).abs() < 5e-4, "{v}");
        }
    }

    #[test]
    fn distance_mode_tighter_on_grid() {
        let w = Vec3::new(0.0, 0.0, 0.0);
        let ql = Vec3::new(0.0, 400.0, 100.0);
        for i in 0..=800 {
            let q = Vec3::new(0.0, i as f64, 100.0);
            let a = rate_surrogate(&q, &w, 1e6, 2.3, &ql, SurrogateMode::Distance);
            let b = rate_surrogate(&q, &w, 1e6, 2.3, &ql, SurrogateMode::DistanceSq);
            assert!(a >= b - 1e-12);
        }
    }

    #[test]
    fn minspeed_orthogonal() {
        let v = minspeed_surrogate(&Vec3::new(0.0, 1.0, 0.0), &Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(v, -1.0);
    }

    #[test]
    fn f32_surrogate() {
        let w = Vec3::new(0.0f32, 0.0, 0.0);
        let ql = Vec3::new(0.0f32, 400.0, 100.0);
        let v = rate_surrogate(&ql, &w, 1e6f32, 2.3, &ql, SurrogateMode::Distance);
        assert!((v - 0.975).abs() < 1e-3);
    }

    fn pt() -> impl Strategy<Value = Vec3<f64>> {
        (-1000.0f64..1000.0, -1000.0f64..1000.0, 1.0f64..300.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn rate_bounds_hold(q in pt(), ql in pt(), g_db in 20.0f64..90.0, alpha in 2.0f64..4.0) {
            let w = Vec3::new(0.0, 0.0, 0.0);
            let gamma = 10f64.powf(g_db / 10.0);
            let truth = rate_at_distance(q.norm(), gamma, alpha);
            for mode in [SurrogateMode::Distance, SurrogateMode::DistanceSq] {
                let s = rate_surrogate(&q, &w, gamma, alpha, &ql, mode);
                prop_assert!(s <= truth + 1e-9 * (1.0 + truth));
            }
        }

        #[test]
        fn speed_bound_holds(v in pt(), vl in pt()) {
            prop_assert!(minspeed_surrogate(&v, &vl) <= v.norm_sq() + 1e-9);
        }

        #[test]
        fn distance_bound_holds(q in pt(), ql in pt(), c in pt()) {
            prop_assume!(ql.distance(&c) > 1e-3);
            prop_assert!(distance_surrogate(&q, &c, &ql) <= q.distance(&c) + 1e-9);
        }
    }
}
