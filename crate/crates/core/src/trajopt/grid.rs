use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Equal time slots with the kinematic state at each slot boundary.
///
/// `q` and `v` have `n + 1` entries, `a` has `n`; acceleration is constant
/// within a slot.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid<T = f64> {
    pub n: usize,
    pub delta_t: T,
    pub q: Vec<Vec3<T>>,
    pub v: Vec<Vec3<T>>,
    pub a: Vec<Vec3<T>>,
}

/// Slot count `ceil(T Vmax / Delta_max)` and slot length `T / N`.
pub fn time_discretize<T: Real>(horizon: T, v_max: T, delta_max: T) -> Result<TimeGrid<T>> {
    for (name, v) in [("T", horizon), ("Vmax", v_max), ("Delta_max", delta_max)] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::invalid(name, "must be positive and finite"));
        }
    }
    let n = (horizon * v_max / delta_max).ceil().to_usize().unwrap_or(1).max(1);
    Ok(TimeGrid { n, delta_t: horizon / T::from_usize(n).unwrap(), q: Vec::new(), v: Vec::new(), a: Vec::new() })
}

impl<T: Real> TimeGrid<T> {
    /// Rolls the state forward from `q0`, `v0` under per-slot accelerations.
    pub fn rollout(&mut self, q0: Vec3<T>, v0: Vec3<T>, accel: &[Vec3<T>]) -> Result<()> {
        if accel.len() != self.n {
            return Err(Error::invalid("a", format!("expected {} slot accelerations", self.n)));
        }
        let dt = self.delta_t;
        let half = T::lit(0.5) * dt * dt;
        self.q = vec![q0];
        self.v = vec![v0];
        self.a = accel.to_vec();
        for a in accel {
            let (q, v) = (*self.q.last().unwrap(), *self.v.last().unwrap());
            self.q.push(q + v * dt + *a * half);
            self.v.push(v + *a * dt);
        }
        Ok(())
    }

    /// Fills the state from slot-boundary positions and the initial velocity,
    /// choosing the per-slot accelerations that reproduce the positions.
    pub fn from_positions(q: Vec<Vec3<T>>, delta_t: T, v0: Vec3<T>) -> Result<Self> {
        if q.len() < 2 {
            return Err(Error::invalid("q", "need at least two positions"));
        }
        let n = q.len() - 1;
        let two = T::lit(2.0);
        let mut v = vec![v0];
        let mut a = Vec::with_capacity(n);
        for w in q.windows(2) {
            let vn = *v.last().unwrap();
            let an = (w[1] - w[0] - vn * delta_t) * (two / (delta_t * delta_t));
            a.push(an);
            v.push(vn + an * delta_t);
        }
        Ok(Self { n, delta_t, q, v, a })
    }

    /// Largest violation of the slot update equations over the grid.
    pub fn consistency_error(&self) -> T {
        let dt = self.delta_t;
        let half = T::lit(0.5) * dt * dt;
        (0..self.a.len())
            .map(|i| {
                let ev = (self.v[i + 1] - self.v[i] - self.a[i] * dt).norm();
                let eq = (self.q[i + 1] - self.q[i] - self.v[i] * dt - self.a[i] * half).norm();
                ev.max(eq)
            })
            .fold(T::zero(), T::max)
    }
}

/// Line segments of unequal length; hovering is a zero-length segment with
/// positive duration.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid<T = f64> {
    pub m: usize,
    pub waypoints: Vec<Vec3<T>>,
    pub durations: Vec<T>,
}

/// Segment count `ceil(D / Delta_max)`.
pub fn path_discretize<T: Real>(length: T, delta_max: T) -> Result<PathGrid<T>> {
    if !(delta_max > T::zero()) || !(length >= T::zero()) || !length.is_finite() {
        return Err(Error::invalid("Delta_max", "length must be non-negative and Delta_max positive"));
    }
    let m = (length / delta_max).ceil().to_usize().unwrap_or(1).max(1);
    Ok(PathGrid { m, waypoints: Vec::new(), durations: Vec::new() })
}

impl<T: Real> PathGrid<T> {
    pub fn new(waypoints: Vec<Vec3<T>>, durations: Vec<T>) -> Result<Self> {
        let g = Self { m: durations.len(), waypoints, durations };
        if g.waypoints.len() != g.m + 1 || g.m == 0 {
            return Err(Error::invalid("waypoints", "need one more waypoint than segments"));
        }
        if g.durations.iter().any(|&t| !(t > T::zero())) {
            return Err(Error::invalid("T_m", "segment durations must be positive"));
        }
        Ok(g)
    }

    /// Checks every segment length against `delta_max`.
    pub fn check_segments(&self, delta_max: T) -> Result<()> {
        for (i, w) in self.waypoints.windows(2).enumerate() {
            if w[0].distance(&w[1]) > delta_max * (T::one() + T::lit(1e-12)) {
                return Err(Error::invalid("waypoints", format!("segment {} exceeds Delta_max", i + 1)));
            }
        }
        Ok(())
    }

    pub fn total_time(&self) -> T {
        self.durations.iter().copied().sum()
    }

    pub fn length(&self) -> T {
        self.waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn slot_counts() {
        let g = time_discretize(100.0, 30.0, 3.0).unwrap();
        assert_eq!(g.n, 1000);
        assert!((g.delta_t - 0.1f64).abs() < 1e-15);
        assert_eq!(time_discretize(10.0, 1.0, 50.0).unwrap().n, 1);
        assert_eq!(path_discretize(3000.0, 100.0).unwrap().m, 30);
        assert!(time_discretize(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn constant_acceleration_telescopes() {
        let mut g = time_discretize(10.0, 1.0, 0.1).unwrap();
        let a0 = Vec3::new(0.5, -0.25, 0.125);
        g.rollout(Vec3::zero(), Vec3::zero(), &vec![a0; g.n]).unwrap();
        for (i, v) in g.v.iter().enumerate() {
            let expect = a0 * (i as f64 * g.delta_t);
            assert!((*v - expect).norm() < 1e-12);
        }
        assert!(g.consistency_error() < 1e-9);
    }

    #[test]
    fn hover_segment() {
        let p = Vec3::new(1.0, 2.0, 100.0);
        let g = PathGrid::new(vec![p, p], vec![1000.0]).unwrap();
        assert_eq!(g.m, 1);
        assert_eq!(g.length(), 0.0);
        assert_eq!(g.total_time(), 1000.0);
        g.check_segments(1.0).unwrap();
    }

    proptest! {
        #[test]
        fn positions_round_trip(xs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..20), dt in 0.1f64..5.0) {
            let q: Vec<_> = xs.iter().map(|&(x, y)| Vec3::new(x, y, 50.0)).collect();
            let g = TimeGrid::from_positions(q.clone(), dt, Vec3::zero()).unwrap();
            prop_assert_eq!(&g.q, &q);
            let scale = 1.0 + q.iter().map(|p| p.norm()).fold(0.0, f64::max);
            prop_assert!(g.consistency_error() < 1e-9 * scale);
        }

        #[test]
        fn durations_additive(ts in prop::collection::vec(0.1f64..50.0, 1..30)) {
            let wps = vec![Vec3::new(0.0, 0.0, 0.0); ts.len() + 1];
            let g = PathGrid::new(wps, ts.clone()).unwrap();
            let total: f64 = ts.iter().sum();
            prop_assert!((g.total_time() - total).abs() < 1e-9);
        }
    }
}
