use super::geom::{convex_hull, smallest_enclosing_circle, Circle};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

fn check(gts: &[Vec3<f64>], r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid("cov_radius", "must be positive"));
    }
    if gts.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("gts", "coordinates must be finite"));
    }
    Ok(())
}

fn within(c: &Circle, p: &Vec3<f64>, r: f64) -> bool {
    (p.x - c.cx).hypot(p.y - c.cy) <= r * (1.0 + 1e-12)
}

/// Successive boundary-first placement: each UAV covers the longest run of
/// consecutive hull vertices of the still uncovered ground terminals that
/// fits in one disc, then absorbs nearby uncovered terminals while the disc
/// still fits. The next run starts at the hull vertex nearest the previous
/// UAV, so placements move inwards along a spiral.
///
/// Returns horizontal UAV positions (`z = 0`).
pub fn spiral_placement(gts: &[Vec3<f64>], cov_radius: f64) -> Result<Vec<Vec3<f64>>> {
    check(gts, cov_radius)?;
    let r = cov_radius;
    let mut uncovered: Vec<usize> = (0..gts.len()).collect();
    let mut centres: Vec<Circle> = Vec::new();
    while !uncovered.is_empty() {
        let sub: Vec<Vec3<f64>> = uncovered.iter().map(|&i| gts[i]).collect();
        let hull: Vec<usize> = convex_hull(&sub).into_iter().map(|k| uncovered[k]).collect();
        let first = match centres.last() {
            None => 0,
            Some(c) => (0..hull.len())
                .min_by(|&a, &b| {
                    let da = (gts[hull[a]].x - c.cx).hypot(gts[hull[a]].y - c.cy);
                    let db = (gts[hull[b]].x - c.cx).hypot(gts[hull[b]].y - c.cy);
                    da.partial_cmp(&db).expect("finite").then(a.cmp(&b))
                })
                .expect("non-empty hull"),
        };
        let mut chosen = vec![hull[first]];
        let mut disc = smallest_enclosing_circle(&[gts[hull[first]]]);
        for step in 1..hull.len() {
            let idx = hull[(first + step) % hull.len()];
            let mut trial: Vec<Vec3<f64>> = chosen.iter().map(|&i| gts[i]).collect();
            trial.push(gts[idx]);
            let c = smallest_enclosing_circle(&trial);
            if c.r > r {
                break;
            }
            chosen.push(idx);
            disc = c;
        }
        let mut rest: Vec<usize> = uncovered.iter().copied().filter(|i| !chosen.contains(i)).collect();
        loop {
            rest.sort_by(|&a, &b| {
                let da = (gts[a].x - disc.cx).hypot(gts[a].y - disc.cy);
                let db = (gts[b].x - disc.cx).hypot(gts[b].y - disc.cy);
                da.partial_cmp(&db).expect("finite").then(a.cmp(&b))
            });
            let mut grew = false;
            for k in 0..rest.len() {
                let mut trial: Vec<Vec3<f64>> = chosen.iter().map(|&i| gts[i]).collect();
                trial.push(gts[rest[k]]);
                let c = smallest_enclosing_circle(&trial);
                if c.r <= r {
                    chosen.push(rest.remove(k));
                    disc = c;
                    grew = true;
                    break;
                }
            }
            if !grew {
                break;
            }
        }
        uncovered.retain(|&i| !within(&disc, &gts[i], r));
        centres.push(disc);
    }
    let mut keep = vec![true; centres.len()];
    for k in (0..centres.len()).rev() {
        keep[k] = false;
        let covered = gts.iter().all(|p| (0..centres.len()).any(|j| keep[j] && within(&centres[j], p, r)));
        if !covered {
            keep[k] = true;
        }
    }
    Ok(centres
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(c, _)| Vec3::new(c.cx, c.cy, 0.0))
        .collect())
}

/// Strip baseline: horizontal strips of height `sqrt(3) R`, each covered
/// left to right by discs centred on the strip mid-line.
pub fn strip_placement(gts: &[Vec3<f64>], cov_radius: f64) -> Result<Vec<Vec3<f64>>> {
    check(gts, cov_radius)?;
    let r = cov_radius;
    if gts.is_empty() {
        return Ok(Vec::new());
    }
    let h = 3f64.sqrt() * r;
    let y0 = gts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let mut uncovered: Vec<bool> = vec![true; gts.len()];
    let mut out = Vec::new();
    let strips = gts.iter().map(|p| ((p.y - y0) / h).floor() as usize).max().unwrap_or(0) + 1;
    for s in 0..strips {
        let mid = y0 + h * (s as f64 + 0.5);
        loop {
            let left = (0..gts.len())
                .filter(|&i| uncovered[i] && ((gts[i].y - y0) / h).floor() as usize == s)
                .min_by(|&a, &b| gts[a].x.partial_cmp(&gts[b].x).expect("finite").then(a.cmp(&b)));
            let Some(i) = left else { break };
            let c = Vec3::new(gts[i].x + r / 2.0, mid, 0.0);
            for (j, u) in uncovered.iter_mut().enumerate() {
                if *u && (gts[j].x - c.x).hypot(gts[j].y - c.y) <= r * (1.0 + 1e-12) {
                    *u = false;
                }
            }
            out.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn v(x: f64, y: f64) -> Vec3<f64> {
        Vec3::new(x, y, 0.0)
    }

    fn certificate(gts: &[Vec3<f64>], uavs: &[Vec3<f64>], r: f64) -> bool {
        gts.iter().all(|p| uavs.iter().any(|u| p.horizontal_distance(u) <= r + 1e-9))
    }

    #[test]
    fn single_disc() {
        let gts = vec![v(0.0, 0.0), v(10.0, 0.0), v(5.0, 5.0), v(3.0, -4.0)];
        let u = spiral_placement(&gts, 10.0).unwrap();
        assert_eq!(u.len(), 1);
        assert!(certificate(&gts, &u, 10.0));
    }

    #[test]
    fn isolated_terminals() {
        let gts: Vec<_> = (0..6).map(|i| v(100.0 * i as f64, 37.0 * (i % 2) as f64)).collect();
        let u = spiral_placement(&gts, 10.0).unwrap();
        assert_eq!(u.len(), 6);
        assert!(certificate(&gts, &u, 10.0));
    }

    #[test]
    fn covers_random_instances() {
        let mut rng = crate::rng::stream(12, &[]);
        for _ in 0..30 {
            let gts: Vec<_> = (0..50).map(|_| v(rng.random_range(0.0..1000.0), rng.random_range(0.0..1000.0))).collect();
            let u = spiral_placement(&gts, 150.0).unwrap();
            let s = strip_placement(&gts, 150.0).unwrap();
            assert!(certificate(&gts, &u, 150.0));
            assert!(certificate(&gts, &s, 150.0));
        }
    }

    #[test]
    fn empty_and_invalid() {
        assert!(spiral_placement(&[], 10.0).unwrap().is_empty());
        assert!(spiral_placement(&[v(0.0, 0.0)], 0.0).is_err());
    }
}
