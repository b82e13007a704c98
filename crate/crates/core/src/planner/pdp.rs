use super::tsp::{path_length, Tour, WaypointSet};
use crate::error::{Error, Result};

/// `source` must be visited before `destination` (indices into the points).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecedencePair {
    pub source: usize,
    pub destination: usize,
}

/// Transitive closure `before[a][b]`: `a` must precede `b`. Errors on cycles.
fn closure(n: usize, pairs: &[PrecedencePair]) -> Result<Vec<Vec<bool>>> {
    let mut before = vec![vec![false; n]; n];
    for p in pairs {
        if p.source >= n || p.destination >= n {
            return Err(Error::invalid("pairs", "precedence index out of range"));
        }
        if p.source == p.destination {
            return Err(Error::invalid("pairs", "source and destination must differ"));
        }
        before[p.source][p.destination] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if before[i][k] {
                for j in 0..n {
                    if before[k][j] {
                        before[i][j] = true;
                    }
                }
            }
        }
    }
    if (0..n).any(|i| before[i][i]) {
        return Err(Error::Infeasible("contradictory precedence constraints".into()));
    }
    Ok(before)
}

fn respects(order: &[usize], before: &[Vec<bool>]) -> bool {
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if before[b][a] {
                return false;
            }
        }
    }
    true
}

/// Precedence-constrained path: cheapest feasible insertion followed by
/// precedence-preserving relocation and reversal moves. Without fixed
/// endpoints the path is open.
pub fn solve_pdp(pairs: &[PrecedencePair], ws: &WaypointSet) -> Result<Tour> {
    ws.validate()?;
    let n = ws.points.len();
    let before = closure(n, pairs)?;
    let pts = &ws.points;
    let (s, e) = (ws.start.as_ref(), ws.end.as_ref());
    let open_len = |order: &[usize]| -> f64 {
        if order.is_empty() {
            return 0.0;
        }
        if s.is_none() && e.is_none() {
            return order.windows(2).map(|w| pts[w[0]].distance(&pts[w[1]])).sum();
        }
        path_length(pts, order, s, e)
    };

    let mut route: Vec<usize> = Vec::with_capacity(n);
    let mut inserted = vec![false; n];
    for _ in 0..n {
        let mut best: Option<(f64, usize, usize)> = None;
        for v in 0..n {
            if inserted[v] {
                continue;
            }
            let lo = route.iter().rposition(|&u| before[u][v]).map_or(0, |p| p + 1);
            let hi = route.iter().position(|&u| before[v][u]).unwrap_or(route.len());
            let base = open_len(&route);
            for pos in lo..=hi {
                let mut cand = route.clone();
                cand.insert(pos, v);
                let delta = open_len(&cand) - base;
                if best.is_none_or(|b| delta < b.0) {
                    best = Some((delta, v, pos));
                }
            }
        }
        let (_, v, pos) = best.expect("closure guarantees a feasible slot");
        route.insert(pos, v);
        inserted[v] = true;
    }

    let eps = 1e-12 * open_len(&route).max(1.0);
    loop {
        let cur = open_len(&route);
        let mut best: Option<(f64, Vec<usize>)> = None;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut cand = route.clone();
                let x = cand.remove(i);
                cand.insert(j, x);
                if respects(&cand, &before) {
                    let l = open_len(&cand);
                    if l < cur - eps && best.as_ref().is_none_or(|b| l < b.0) {
                        best = Some((l, cand));
                    }
                }
            }
            for j in i + 2..=n {
                let mut cand = route.clone();
                cand[i..j].reverse();
                if respects(&cand, &before) {
                    let l = open_len(&cand);
                    if l < cur - eps && best.as_ref().is_none_or(|b| l < b.0) {
                        best = Some((l, cand));
                    }
                }
            }
        }
        match best {
            Some((_, r)) => route = r,
            None => break,
        }
    }
    let length = open_len(&route);
    Ok(Tour { order: route, length })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::Vec3;
    use rand::Rng;

    fn v(x: f64, y: f64) -> Vec3<f64> {
        Vec3::new(x, y, 0.0)
    }

    #[test]
    fn single_pair_forced() {
        let ws = WaypointSet { points: vec![v(10.0, 0.0), v(5.0, 0.0)], start: Some(v(0.0, 0.0)), end: Some(v(20.0, 0.0)) };
        let t = solve_pdp(&[PrecedencePair { source: 0, destination: 1 }], &ws).unwrap();
        assert_eq!(t.order, vec![0, 1]);
        assert!((t.length - 30.0).abs() < 1e-12);
    }

    #[test]
    fn contradictions_rejected() {
        let ws = WaypointSet::closed(vec![v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0)]);
        let p = |a, b| PrecedencePair { source: a, destination: b };
        assert!(solve_pdp(&[p(0, 1), p(1, 0)], &ws).is_err());
        assert!(solve_pdp(&[p(0, 1), p(1, 2), p(2, 0)], &ws).is_err());
        assert!(solve_pdp(&[p(0, 0)], &ws).is_err());
        assert!(solve_pdp(&[p(0, 5)], &ws).is_err());
    }

    #[test]
    fn transitive_chains_respected() {
        let mut rng = crate::rng::stream(6, &[]);
        for _ in 0..50 {
            let n = 7;
            let pts: Vec<_> = (0..n).map(|_| v(rng.random_range(0.0..100.0), rng.random_range(0.0..100.0))).collect();
            let pairs = [
                PrecedencePair { source: 3, destination: 1 },
                PrecedencePair { source: 1, destination: 5 },
                PrecedencePair { source: 0, destination: 6 },
            ];
            let ws = WaypointSet { points: pts, start: Some(v(50.0, 50.0)), end: None };
            let t = solve_pdp(&pairs, &ws).unwrap();
            let pos = |x: usize| t.order.iter().position(|&y| y == x).unwrap();
            assert!(pos(3) < pos(1) && pos(1) < pos(5) && pos(0) < pos(6));
            let mut s = t.order.clone();
            s.sort();
            assert_eq!(s, (0..n).collect::<Vec<_>>());
        }
    }
}
