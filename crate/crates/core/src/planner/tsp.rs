use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Points to visit, with optional fixed start and end locations.
#[derive(Debug, Clone, PartialEq)]
pub struct WaypointSet {
    pub points: Vec<Vec3<f64>>,
    pub start: Option<Vec3<f64>>,
    pub end: Option<Vec3<f64>>,
}

impl WaypointSet {
    pub fn closed(points: Vec<Vec3<f64>>) -> Self {
        Self { points, start: None, end: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::invalid("points", "need at least one point"));
        }
        let all = self.points.iter().chain(self.start.iter()).chain(self.end.iter());
        if all.into_iter().any(|p| !p.is_finite()) {
            return Err(Error::invalid("points", "coordinates must be finite"));
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.start.is_none() && self.end.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TspMode {
    /// Bitmask dynamic programming; at most [`EXACT_TSP_LIMIT`] points.
    Exact,
    /// Nearest neighbour from every start, then 2-opt and or-opt.
    Heuristic,
}

pub const EXACT_TSP_LIMIT: usize = 14;

/// Visiting order (indices into the point list) and its length, including
/// the legs from the start and to the end when those are fixed. Without
/// fixed endpoints the tour is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

/// Length of visiting `points` in `order`, closed when no endpoint is given.
pub fn path_length(points: &[Vec3<f64>], order: &[usize], start: Option<&Vec3<f64>>, end: Option<&Vec3<f64>>) -> f64 {
    if order.is_empty() {
        return match (start, end) {
            (Some(s), Some(e)) => s.distance(e),
            _ => 0.0,
        };
    }
    let mut len: f64 = order.windows(2).map(|w| points[w[0]].distance(&points[w[1]])).sum();
    let first = &points[order[0]];
    let last = &points[*order.last().expect("non-empty")];
    if start.is_none() && end.is_none() {
        return len + last.distance(first);
    }
    if let Some(s) = start {
        len += s.distance(first);
    }
    if let Some(e) = end {
        len += last.distance(e);
    }
    len
}

/// Symmetric distance matrix over the points plus the nodes used to turn the
/// open-path problem into a closed tour.
///
/// A dummy node joins the fixed endpoints at zero cost; every other dummy
/// edge costs a uniform large constant. With a single fixed endpoint the
/// tour therefore pays that constant exactly once, on the edge to the free
/// end of the path.
pub(crate) struct Augmented {
    pub dist: Vec<Vec<f64>>,
    pub n_points: usize,
    pub start: Option<usize>,
    pub end: Option<usize>,
    pub dummy: Option<usize>,
    pub eps: f64,
}

impl Augmented {
    pub fn new(ws: &WaypointSet) -> Self {
        let mut nodes = ws.points.clone();
        let n_points = nodes.len();
        let start = ws.start.map(|s| {
            nodes.push(s);
            nodes.len() - 1
        });
        let end = ws.end.map(|e| {
            nodes.push(e);
            nodes.len() - 1
        });
        let (mut lo, mut hi) = (nodes[0], nodes[0]);
        for p in &nodes {
            lo = Vec3::new(lo.x.min(p.x), lo.y.min(p.y), lo.z.min(p.z));
            hi = Vec3::new(hi.x.max(p.x), hi.y.max(p.y), hi.z.max(p.z));
        }
        let diag = lo.distance(&hi).max(1.0);
        let big = 1e6 * diag;
        let n = nodes.len() + usize::from(start.is_some() || end.is_some());
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..nodes.len() {
            for j in 0..nodes.len() {
                dist[i][j] = nodes[i].distance(&nodes[j]);
            }
        }
        let dummy = if start.is_some() || end.is_some() {
            let d = n - 1;
            for i in 0..nodes.len() {
                let w = if Some(i) == start || Some(i) == end { 0.0 } else { big };
                dist[d][i] = w;
                dist[i][d] = w;
            }
            Some(d)
        } else {
            None
        };
        Self { dist, n_points, start, end, dummy, eps: 1e-9 * diag }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn tour_cost(&self, t: &[usize]) -> f64 {
        (0..t.len()).map(|i| self.dist[t[i]][t[(i + 1) % t.len()]]).sum()
    }

    /// Extracts the point order from a closed tour over all augmented nodes.
    pub fn extract(&self, tour: &[usize]) -> Vec<usize> {
        let Some(d) = self.dummy else {
            let mut t = tour.to_vec();
            let pos = t.iter().position(|&x| x == 0).expect("node 0 present");
            t.rotate_left(pos);
            if t.len() > 2 && t[t.len() - 1] < t[1] {
                t[1..].reverse();
            }
            return t;
        };
        let mut t = tour.to_vec();
        let pos = t.iter().position(|&x| x == d).expect("dummy present");
        t.rotate_left(pos);
        let mut rest: Vec<usize> = t[1..].to_vec();
        let forward = match (self.start, self.end) {
            (Some(s), _) => rest.first() == Some(&s),
            (None, Some(e)) => rest.last() == Some(&e),
            (None, None) => true,
        };
        if !forward {
            rest.reverse();
        }
        rest.retain(|&x| x < self.n_points);
        rest
    }
}

fn held_karp(dist: &[Vec<f64>]) -> Vec<usize> {
    let n = dist.len();
    if n <= 3 {
        return (0..n).collect();
    }
    let m = n - 1;
    let full = 1usize << m;
    let mut dp = vec![f64::INFINITY; full * m];
    let mut parent = vec![usize::MAX; full * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = dist[0][j + 1];
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let cur = dp[mask * m + j];
            if !cur.is_finite() {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let nm = mask | (1 << k);
                let v = cur + dist[j + 1][k + 1];
                if v < dp[nm * m + k] {
                    dp[nm * m + k] = v;
                    parent[nm * m + k] = j;
                }
            }
        }
    }
    let last_mask = full - 1;
    let mut best = (f64::INFINITY, 0);
    for j in 0..m {
        let v = dp[last_mask * m + j] + dist[j + 1][0];
        if v < best.0 {
            best = (v, j);
        }
    }
    let mut order = Vec::with_capacity(n);
    let (mut mask, mut j) = (last_mask, best.1);
    while j != usize::MAX {
        order.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        j = p;
    }
    order.push(0);
    order.reverse();
    order
}

fn nearest_neighbor(dist: &[Vec<f64>], start: usize) -> Vec<usize> {
    let n = dist.len();
    let mut used = vec![false; n];
    let mut t = vec![start];
    used[start] = true;
    let mut cur = start;
    for _ in 1..n {
        let mut best = usize::MAX;
        for j in 0..n {
            if !used[j] && (best == usize::MAX || dist[cur][j] < dist[cur][best]) {
                best = j;
            }
        }
        used[best] = true;
        t.push(best);
        cur = best;
    }
    t
}

/// One first-improvement 2-opt pass. Returns true if the tour changed.
pub(crate) fn two_opt_pass(dist: &[Vec<f64>], t: &mut [usize], eps: f64) -> bool {
    let n = t.len();
    if n < 4 {
        return false;
    }
    let mut improved = false;
    for i in 0..n - 1 {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b, c, d) = (t[i], t[i + 1], t[j], t[(j + 1) % n]);
            let delta = dist[a][c] + dist[b][d] - dist[a][b] - dist[c][d];
            if delta < -eps {
                t[i + 1..=j].reverse();
                improved = true;
            }
        }
    }
    improved
}

/// True when no single 2-opt move shortens the closed tour by more than `eps`.
#[cfg(test)]
pub(crate) fn is_two_opt_optimal(dist: &[Vec<f64>], t: &[usize], eps: f64) -> bool {
    let mut c = t.to_vec();
    !two_opt_pass(dist, &mut c, eps)
}

/// One or-opt pass moving segments of up to three nodes.
fn or_opt_pass(dist: &[Vec<f64>], t: &mut Vec<usize>, eps: f64) -> bool {
    let n = t.len();
    let mut improved = false;
    for len in 1..=3usize {
        if n < len + 3 {
            break;
        }
        let mut i = 0;
        while i + len <= n {
            let prev = t[(i + n - 1) % n];
            let s0 = t[i];
            let sl = t[i + len - 1];
            let next = t[(i + len) % n];
            let gain = dist[prev][s0] + dist[sl][next] - dist[prev][next];
            let mut best: Option<(f64, usize, bool)> = None;
            for k in 0..n {
                let (u, v) = (t[k], t[(k + 1) % n]);
                let in_seg = |x: usize| (i..i + len).contains(&x);
                if in_seg(k) || in_seg((k + 1) % n) || (u == prev && v == next) {
                    continue;
                }
                if (k + 1) % n == i || k == (i + len) % n {
                    continue;
                }
                let fwd = dist[u][s0] + dist[sl][v] - dist[u][v] - gain;
                let rev = dist[u][sl] + dist[s0][v] - dist[u][v] - gain;
                for (delta, reversed) in [(fwd, false), (rev, true)] {
                    if delta < -eps && best.is_none_or(|b| delta < b.0) {
                        best = Some((delta, k, reversed));
                    }
                }
            }
            if let Some((_, k, reversed)) = best {
                let mut seg: Vec<usize> = t[i..i + len].to_vec();
                if reversed {
                    seg.reverse();
                }
                let u = t[k];
                let mut rest: Vec<usize> = t.iter().copied().enumerate().filter(|(j, _)| !(i..i + len).contains(j)).map(|(_, x)| x).collect();
                let pos = rest.iter().position(|&x| x == u).expect("u kept") + 1;
                rest.splice(pos..pos, seg);
                *t = rest;
                improved = true;
            }
            i += 1;
        }
    }
    improved
}

pub(crate) fn local_search(dist: &[Vec<f64>], t: &mut Vec<usize>, eps: f64) {
    for _ in 0..10_000 {
        let a = two_opt_pass(dist, t, eps);
        let b = or_opt_pass(dist, t, eps);
        if !a && !b {
            break;
        }
    }
}

/// Solves the travelling-salesman problem over `ws`.
pub fn solve_tsp(ws: &WaypointSet, mode: TspMode) -> Result<Tour> {
    ws.validate()?;
    let aug = Augmented::new(ws);
    let tour = match mode {
        TspMode::Exact => {
            if ws.points.len() > EXACT_TSP_LIMIT {
                return Err(Error::invalid(
                    "points",
                    format!("exact mode supports at most {EXACT_TSP_LIMIT} points, got {}", ws.points.len()),
                ));
            }
            held_karp(&aug.dist)
        }
        TspMode::Heuristic => {
            let mut best: Option<(f64, Vec<usize>)> = None;
            for s in 0..aug.len() {
                let mut t = nearest_neighbor(&aug.dist, s);
                local_search(&aug.dist, &mut t, aug.eps);
                let c = aug.tour_cost(&t);
                if best.as_ref().is_none_or(|b| c < b.0 - aug.eps) {
                    best = Some((c, t));
                }
            }
            best.expect("at least one node").1
        }
    };
    let order = aug.extract(&tour);
    let length = path_length(&ws.points, &order, ws.start.as_ref(), ws.end.as_ref());
    Ok(Tour { order, length })
}
