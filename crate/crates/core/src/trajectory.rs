//! Piecewise-linear trajectories.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::vec3::Vec3;

/// Waypoints `q_0..q_M` joined by straight segments flown at constant velocity.
///
/// Segment `m` (1-based) runs from `q_{m-1}` to `q_m` in `durations[m-1]`
/// seconds. Boundary velocities default to the first and last segment
/// velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T = f64> {
    pub waypoints: Vec<Vec3<T>>,
    pub durations: Vec<T>,
    pub v_start: Option<Vec3<T>>,
    pub v_end: Option<Vec3<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(waypoints: Vec<Vec3<T>>, durations: Vec<T>) -> Result<Self> {
        let t = Self { waypoints, durations, v_start: None, v_end: None };
        t.validate()?;
        Ok(t)
    }

    /// Equal-duration slots of length `dt`.
    pub fn uniform(waypoints: Vec<Vec3<T>>, dt: T) -> Result<Self> {
        let n = waypoints.len().saturating_sub(1);
        Self::new(waypoints, vec![dt; n])
    }

    pub fn with_boundary_velocities(mut self, v_start: Vec3<T>, v_end: Vec3<T>) -> Self {
        self.v_start = Some(v_start);
        self.v_end = Some(v_end);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::invalid("trajectory", "need at least two waypoints"));
        }
        if self.durations.len() + 1 != self.waypoints.len() {
            return Err(Error::invalid("trajectory", "need one duration per segment"));
        }
        if self.durations.iter().any(|&d| !(d > T::zero()) || !d.is_finite()) {
            return Err(Error::invalid("trajectory", "segment durations must be positive"));
        }
        if self.waypoints.iter().any(|q| !q.is_finite()) {
            return Err(Error::invalid("trajectory", "waypoints must be finite"));
        }
        Ok(())
    }

    pub fn segments(&self) -> usize {
        self.durations.len()
    }

    pub fn total_time(&self) -> T {
        self.durations.iter().copied().sum()
    }

    pub fn length(&self) -> T {
        self.waypoints.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    /// Velocity on segment `m` (0-based).
    pub fn segment_velocity(&self, m: usize) -> Vec3<T> {
        (self.waypoints[m + 1] - self.waypoints[m]) / self.durations[m]
    }

    pub fn start_velocity(&self) -> Vec3<T> {
        self.v_start.unwrap_or_else(|| self.segment_velocity(0))
    }

    pub fn end_velocity(&self) -> Vec3<T> {
        self.v_end.unwrap_or_else(|| self.segment_velocity(self.segments() - 1))
    }

    /// Splits at waypoint `k` (0 < k < M). Both parts share the velocity of
    /// the segment ending at `k` as their common boundary velocity.
    pub fn split_at(&self, k: usize) -> Result<(Self, Self)> {
        if k == 0 || k >= self.segments() {
            return Err(Error::invalid("k", "split index must be an interior waypoint"));
        }
        let v_mid = self.segment_velocity(k - 1);
        let first = Self {
            waypoints: self.waypoints[..=k].to_vec(),
            durations: self.durations[..k].to_vec(),
            v_start: Some(self.start_velocity()),
            v_end: Some(v_mid),
        };
        let second = Self {
            waypoints: self.waypoints[k..].to_vec(),
            durations: self.durations[k..].to_vec(),
            v_start: Some(v_mid),
            v_end: Some(self.end_velocity()),
        };
        Ok((first, second))
    }

    /// Position at time `t`, clamped to the trajectory span.
    pub fn position_at(&self, t: T) -> Vec3<T> {
        let mut acc = T::zero();
        for (m, &d) in self.durations.iter().enumerate() {
            if t <= acc + d {
                let s = ((t - acc) / d).max(T::zero()).min(T::one());
                return self.waypoints[m] + (self.waypoints[m + 1] - self.waypoints[m]) * s;
            }
            acc += d;
        }
        *self.waypoints.last().expect("validated")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trajectory<f64> {
        Trajectory::new(
            vec![
                Vec3::new(0.0, 0.0, 100.0),
                Vec3::new(100.0, 0.0, 100.0),
                Vec3::new(100.0, 50.0, 120.0),
                Vec3::new(0.0, 0.0, 100.0),
            ],
            vec![5.0, 4.0, 10.0],
        )
        .unwrap()
    }

    #[test]
    fn basics() {
        let t = sample();
        assert_eq!(t.total_time(), 19.0);
        assert_eq!(t.segment_velocity(0), Vec3::new(20.0, 0.0, 0.0));
        assert_eq!(t.position_at(2.5), Vec3::new(50.0, 0.0, 100.0));
        assert_eq!(t.position_at(100.0), Vec3::new(0.0, 0.0, 100.0));
    }

    #[test]
    fn split_shares_velocity() {
        let t = sample();
        let (a, b) = t.split_at(2).unwrap();
        assert_eq!(a.end_velocity(), b.start_velocity());
        assert_eq!(a.total_time() + b.total_time(), t.total_time());
        assert!(t.split_at(0).is_err());
        assert!(t.split_at(3).is_err());
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Trajectory::new(vec![Vec3::new(0.0, 0.0, 0.0)], vec![]).is_err());
        assert!(Trajectory::new(vec![Vec3::zero(), Vec3::zero()], vec![0.0]).is_err());
        assert!(Trajectory::new(vec![Vec3::zero(), Vec3::zero()], vec![1.0, 1.0]).is_err());
    }
}
