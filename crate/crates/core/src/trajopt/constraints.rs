use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Keep-out sphere around `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obstacle {
    pub center: Vec3<f64>,
    pub clearance: f64,
}

/// Axis-aligned box the UAV must stay outside of.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoFlyBox {
    pub lo: Vec3<f64>,
    pub hi: Vec3<f64>,
}

pub(crate) fn axis(v: &Vec3<f64>, i: usize) -> f64 {
    match i {
        0 => v.x,
        1 => v.y,
        _ => v.z,
    }
}

impl NoFlyBox {
    /// Signed margins of the six face half-spaces `x <= lo.x`, `x >= hi.x`, ...
    /// ordered as (axis, outward sign).
    pub fn face_margins(&self, q: &Vec3<f64>) -> [(usize, f64, f64); 6] {
        let mut out = [(0, 0.0, 0.0); 6];
        for i in 0..3 {
            out[2 * i] = (i, -1.0, axis(&self.lo, i) - axis(q, i));
            out[2 * i + 1] = (i, 1.0, axis(q, i) - axis(&self.hi, i));
        }
        out
    }

    /// Largest face margin; non-negative outside the box.
    pub fn outside_margin(&self, q: &Vec3<f64>) -> f64 {
        self.face_margins(q).iter().map(|f| f.2).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Flight constraints for one or more UAVs on a uniform time grid.
///
/// `q_start` and `q_end` hold one entry per UAV. Speeds are slot averages and
/// accelerations are differences of consecutive slot velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    pub h_min: f64,
    pub h_max: f64,
    pub q_start: Vec<Vec3<f64>>,
    pub q_end: Vec<Vec3<f64>>,
    pub v_min: f64,
    pub v_max: f64,
    pub a_max: Option<f64>,
    pub obstacles: Vec<Obstacle>,
    pub d_min_uav: f64,
    pub no_fly: Vec<NoFlyBox>,
}

impl ConstraintSet {
    pub fn single(q_start: Vec3<f64>, q_end: Vec3<f64>, h_min: f64, h_max: f64, v_max: f64) -> Self {
        Self {
            h_min,
            h_max,
            q_start: vec![q_start],
            q_end: vec![q_end],
            v_min: 0.0,
            v_max,
            a_max: None,
            obstacles: Vec::new(),
            d_min_uav: 0.0,
            no_fly: Vec::new(),
        }
    }

    pub fn uav_count(&self) -> usize {
        self.q_start.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h_min <= self.h_max) {
            return Err(Error::invalid("Hmin", "must not exceed Hmax"));
        }
        if !(self.v_min >= 0.0 && self.v_min <= self.v_max && self.v_max > 0.0) {
            return Err(Error::invalid("Vmin", "need 0 <= Vmin <= Vmax and Vmax > 0"));
        }
        if let Some(a) = self.a_max {
            if !(a > 0.0) {
                return Err(Error::invalid("a_max", "must be positive"));
            }
        }
        if self.q_start.is_empty() || self.q_start.len() != self.q_end.len() {
            return Err(Error::invalid("q_I", "need one start and one end per UAV"));
        }
        if self.obstacles.iter().any(|o| !(o.clearance >= 0.0)) {
            return Err(Error::invalid("obstacles", "clearance D1 must be non-negative"));
        }
        if !(self.d_min_uav >= 0.0) {
            return Err(Error::invalid("D2", "must be non-negative"));
        }
        if self.no_fly.iter().any(|b| b.lo.x > b.hi.x || b.lo.y > b.hi.y || b.lo.z > b.hi.z) {
            return Err(Error::invalid("no_fly", "box corners must be ordered"));
        }
        Ok(())
    }

    /// Worst violation (in the constraint's own units) and a description.
    pub fn max_violation(&self, paths: &[Vec<Vec3<f64>>], delta_t: f64) -> (f64, String) {
        let mut worst = (0.0, String::new());
        let mut note = |v: f64, what: &dyn Fn() -> String| {
            if v > worst.0 {
                worst = (v, what());
            }
        };
        if paths.len() != self.uav_count() {
            return (f64::INFINITY, "UAV count mismatch".into());
        }
        for (j, q) in paths.iter().enumerate() {
            note(q[0].distance(&self.q_start[j]), &|| format!("UAV {j} start"));
            note(q[q.len() - 1].distance(&self.q_end[j]), &|| format!("UAV {j} end"));
            for (n, p) in q.iter().enumerate() {
                note(self.h_min - p.z, &|| format!("UAV {j} slot {n} below Hmin"));
                note(p.z - self.h_max, &|| format!("UAV {j} slot {n} above Hmax"));
                for o in &self.obstacles {
                    note(o.clearance - p.distance(&o.center), &|| format!("UAV {j} slot {n} obstacle clearance"));
                }
                for b in &self.no_fly {
                    note(-b.outside_margin(p), &|| format!("UAV {j} slot {n} inside no-fly box"));
                }
            }
            for (n, w) in q.windows(2).enumerate() {
                let v = w[0].distance(&w[1]) / delta_t;
                note(v - self.v_max, &|| format!("UAV {j} slot {} above Vmax", n + 1));
                note(self.v_min - v, &|| format!("UAV {j} slot {} below Vmin", n + 1));
            }
            if let Some(a_max) = self.a_max {
                for (n, w) in q.windows(3).enumerate() {
                    let a = (w[2] - w[1] * 2.0 + w[0]).norm() / (delta_t * delta_t);
                    note(a - a_max, &|| format!("UAV {j} slot {} above a_max", n + 1));
                }
            }
        }
        for j in 0..paths.len() {
            for i in 0..j {
                for (n, (a, b)) in paths[i].iter().zip(&paths[j]).enumerate() {
                    note(self.d_min_uav - a.distance(b), &|| format!("UAVs {i},{j} slot {n} separation"));
                }
            }
        }
        worst
    }

    /// Errors with the worst violation when it exceeds `tol`.
    pub fn check(&self, paths: &[Vec<Vec3<f64>>], delta_t: f64, tol: f64) -> Result<()> {
        let (v, what) = self.max_violation(paths, delta_t);
        if v > tol {
            return Err(Error::Infeasible(format!("{what} violated by {v:.3e}")));
        }
        Ok(())
    }
}
