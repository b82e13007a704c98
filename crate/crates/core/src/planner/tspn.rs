use super::tsp::{path_length, solve_tsp, TspMode, WaypointSet};
use crate::error::{Error, Result};
use crate::numerics::bracketed_min;
use crate::vec3::Vec3;

/// Horizontal disc of radius `radius` at the altitude of `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighborhood {
    pub center: Vec3<f64>,
    pub radius: f64,
}

impl Neighborhood {
    fn project(&self, p: &Vec3<f64>) -> Vec3<f64> {
        let dx = p.x - self.center.x;
        let dy = p.y - self.center.y;
        let r = dx.hypot(dy);
        if r <= self.radius {
            Vec3::new(p.x, p.y, self.center.z)
        } else {
            let s = self.radius / r;
            Vec3::new(self.center.x + dx * s, self.center.y + dy * s, self.center.z)
        }
    }

    fn contains(&self, p: &Vec3<f64>) -> bool {
        p.z == self.center.z && (p.x - self.center.x).hypot(p.y - self.center.y) <= self.radius * (1.0 + 1e-12)
    }

    fn boundary(&self, phi: f64) -> Vec3<f64> {
        Vec3::new(
            self.center.x + self.radius * phi.cos(),
            self.center.y + self.radius * phi.sin(),
            self.center.z,
        )
    }

    /// Point of the disc minimizing `|a - x| + |x - b|`.
    fn best_visit(&self, a: &Vec3<f64>, b: &Vec3<f64>) -> Vec3<f64> {
        let cost = |x: &Vec3<f64>| a.distance(x) + x.distance(b);
        if self.radius == 0.0 {
            return self.center;
        }
        let z = self.center.z;
        let ab = *b - *a;
        let candidate = if a.z == z && b.z == z {
            let l2 = ab.x * ab.x + ab.y * ab.y;
            let t = if l2 == 0.0 {
                0.0
            } else {
                (((self.center.x - a.x) * ab.x + (self.center.y - a.y) * ab.y) / l2).clamp(0.0, 1.0)
            };
            Some(*a + ab * t)
        } else if (a.z - z) * (b.z - z) <= 0.0 && a.z != b.z {
            Some(*a + ab * ((z - a.z) / (b.z - a.z)))
        } else {
            None
        };
        if let Some(c) = candidate {
            if self.contains(&c) {
                return Vec3::new(c.x, c.y, z);
            }
        }
        let tau = std::f64::consts::TAU;
        let phi = bracketed_min(|phi| cost(&self.boundary(phi)), 0.0, tau, 721, 1e-12);
        let on_boundary = self.boundary(phi);
        let projected = self.project(a);
        if cost(&projected) < cost(&on_boundary) {
            projected
        } else {
            on_boundary
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TspnResult {
    pub order: Vec<usize>,
    pub visit_points: Vec<Vec3<f64>>,
    pub length: f64,
    /// Tour length after every outer iteration.
    pub history: Vec<f64>,
}

/// Travelling salesman with neighbourhoods: alternates a TSP ordering of the
/// current visit points with coordinate-wise visit point updates until the
/// relative length change falls below `1e-6`.
pub fn solve_tspn(
    nbhds: &[Neighborhood],
    start: Option<Vec3<f64>>,
    end: Option<Vec3<f64>>,
    mode: TspMode,
) -> Result<TspnResult> {
    if nbhds.iter().any(|n| !(n.radius >= 0.0) || !n.center.is_finite()) {
        return Err(Error::invalid("radius", "radii must be non-negative and centres finite"));
    }
    let mut pts: Vec<Vec3<f64>> = nbhds.iter().map(|n| n.center).collect();
    let tour = solve_tsp(&WaypointSet { points: pts.clone(), start, end }, mode)?;
    let mut order = tour.order;
    let mut length = tour.length;
    let mut history = vec![length];
    let closed = start.is_none() && end.is_none();
    for _ in 0..1000 {
        let before = length;
        let n = order.len();
        for pos in 0..n {
            let prev = if pos > 0 {
                pts[order[pos - 1]]
            } else if let Some(s) = start {
                s
            } else if closed {
                pts[order[n - 1]]
            } else {
                pts[order[(pos + 1).min(n - 1)]]
            };
            let next = if pos + 1 < n {
                pts[order[pos + 1]]
            } else if let Some(e) = end {
                e
            } else if closed {
                pts[order[0]]
            } else {
                prev
            };
            let i = order[pos];
            let cand = nbhds[i].best_visit(&prev, &next);
            let old = pts[i];
            pts[i] = cand;
            let new_len = path_length(&pts, &order, start.as_ref(), end.as_ref());
            if new_len >= length {
                pts[i] = old;
            } else {
                length = new_len;
            }
        }
        let reordered = solve_tsp(&WaypointSet { points: pts.clone(), start, end }, mode)?;
        if reordered.length < length {
            order = reordered.order;
            length = reordered.length;
        }
        history.push(length);
        if before - length <= 1e-6 * before.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(TspnResult { order, visit_points: pts, length, history })
}
