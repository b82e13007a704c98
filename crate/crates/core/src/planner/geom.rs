use crate::vec3::Vec3;

/// Circle in the horizontal plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
}

impl Circle {
    pub fn contains(&self, x: f64, y: f64, eps: f64) -> bool {
        (x - self.cx).hypot(y - self.cy) <= self.r + eps
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Indices of the convex hull of the horizontal projections of `pts`, in
/// counter-clockwise order starting from the lowest-x (then lowest-y) point.
/// Collinear boundary points are dropped. Duplicates keep the lowest index.
pub fn convex_hull(pts: &[Vec3<f64>]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        (pts[a].x, pts[a].y, a)
            .partial_cmp(&(pts[b].x, pts[b].y, b))
            .expect("finite coordinates")
    });
    idx.dedup_by(|a, b| pts[*a].x == pts[*b].x && pts[*a].y == pts[*b].y);
    if idx.len() < 3 {
        return idx;
    }
    let p = |i: usize| (pts[i].x, pts[i].y);
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2 && cross(p(lower[lower.len() - 2]), p(lower[lower.len() - 1]), p(i)) <= 0.0 {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2 && cross(p(upper[upper.len() - 2]), p(upper[upper.len() - 1]), p(i)) <= 0.0 {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn circle2(a: (f64, f64), b: (f64, f64)) -> Circle {
    let (cx, cy) = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
    Circle { cx, cy, r: (a.0 - cx).hypot(a.1 - cy) }
}

fn circle3(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<Circle> {
    let (bx, by) = (b.0 - a.0, b.1 - a.1);
    let (cx, cy) = (c.0 - a.0, c.1 - a.1);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-12 * (bx.abs() + by.abs() + cx.abs() + cy.abs()).powi(2).max(1e-300) {
        return None;
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    Some(Circle { cx: a.0 + ux, cy: a.1 + uy, r: ux.hypot(uy) })
}

/// Smallest circle enclosing the horizontal projections of `pts`.
pub fn smallest_enclosing_circle(pts: &[Vec3<f64>]) -> Circle {
    let p: Vec<(f64, f64)> = pts.iter().map(|q| (q.x, q.y)).collect();
    if p.is_empty() {
        return Circle { cx: 0.0, cy: 0.0, r: 0.0 };
    }
    let eps = |c: &Circle| 1e-12 * c.r.max(1.0);
    let mut c = Circle { cx: p[0].0, cy: p[0].1, r: 0.0 };
    for i in 1..p.len() {
        if c.contains(p[i].0, p[i].1, eps(&c)) {
            continue;
        }
        c = Circle { cx: p[i].0, cy: p[i].1, r: 0.0 };
        for j in 0..i {
            if c.contains(p[j].0, p[j].1, eps(&c)) {
                continue;
            }
            c = circle2(p[i], p[j]);
            for k in 0..j {
                if c.contains(p[k].0, p[k].1, eps(&c)) {
                    continue;
                }
                c = circle3(p[i], p[j], p[k]).unwrap_or_else(|| {
                    let cands = [circle2(p[i], p[j]), circle2(p[i], p[k]), circle2(p[j], p[k])];
                    cands.into_iter().fold(Circle { cx: 0.0, cy: 0.0, r: -1.0 }, |a, b| if b.r > a.r { b } else { a })
                });
            }
        }
    }
    c
}
