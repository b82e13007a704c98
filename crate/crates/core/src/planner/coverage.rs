use crate::channel::{expected_path_loss_db, ProbLosParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageProfile {
    pub h_star: f64,
    pub r_star: f64,
    /// `(H, R_cov(H))` for every altitude on the grid.
    pub table: Vec<(f64, f64)>,
}

/// Largest ground radius whose expected path loss at altitude `h` stays
/// within `threshold_db`, capped at `r_max`. Zero when even the point beneath
/// the UAV misses the threshold.
pub fn coverage_radius(p: &ProbLosParams<f64>, threshold_db: f64, h: f64, r_max: f64) -> Result<f64> {
    let pl = |r: f64| expected_path_loss_db(r, h, p);
    if pl(0.0)? > threshold_db {
        return Ok(0.0);
    }
    if pl(r_max)? <= threshold_db {
        return Ok(r_max);
    }
    let (mut lo, mut hi) = (0.0, r_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if pl(mid)? <= threshold_db {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-9 * r_max.max(1.0) {
            break;
        }
    }
    Ok(lo)
}

/// Coverage radius over an altitude grid and its maximizing altitude
/// (lowest altitude on ties).
pub fn coverage_altitude(p: &ProbLosParams<f64>, threshold_db: f64, h_grid: &[f64], r_max: f64) -> Result<CoverageProfile> {
    if h_grid.is_empty() || h_grid.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::invalid("H range", "altitudes must be positive and non-empty"));
    }
    if !(r_max > 0.0) {
        return Err(Error::invalid("r_max", "must be positive"));
    }
    let table: Vec<(f64, f64)> = h_grid
        .iter()
        .map(|&h| coverage_radius(p, threshold_db, h, r_max).map(|r| (h, r)))
        .collect::<Result<_>>()?;
    let (h_star, r_star) = table.iter().fold((f64::NAN, 0.0), |a, &(h, r)| if r > a.1 { (h, r) } else { a });
    if !(r_star > 0.0) {
        return Err(Error::Infeasible(format!(
            "path-loss threshold {threshold_db} dB is not met at any altitude on the grid"
        )));
    }
    Ok(CoverageProfile { h_star, r_star, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::AngleUnit;
    use crate::numerics::difference_sign_changes;

    fn fig12(kappa: f64) -> ProbLosParams<f64> {
        ProbLosParams::new(10.0, 0.6, kappa, 1e-5, 2.3, AngleUnit::Degrees).unwrap()
    }

    fn grid() -> Vec<f64> {
        (0..=990).map(|i| 10.0 + i as f64).collect()
    }

    #[test]
    fn environment_independent_case() {
        let prof = coverage_altitude(&fig12(1.0), 100.0, &grid(), 1e4).unwrap();
        assert_eq!(prof.h_star, 10.0);
        let rs: Vec<f64> = prof.table.iter().map(|t| t.1).collect();
        assert!(rs.windows(2).all(|w| w[1] < w[0] || w[1] == 0.0));
    }

    #[test]
    fn saturation_at_cap() {
        let prof = coverage_altitude(&fig12(0.01), 300.0, &grid(), 2000.0).unwrap();
        assert_eq!(prof.r_star, 2000.0);
    }

    #[test]
    fn fig12_interior_optimum() {
        let prof = coverage_altitude(&fig12(0.01), 100.0, &grid(), 1e4).unwrap();
        assert!(prof.h_star > 10.0 && prof.h_star < 1000.0, "{}", prof.h_star);
        let rs: Vec<f64> = prof.table.iter().map(|t| t.1).collect();
        assert!(difference_sign_changes(&rs) <= 1);
        let dense_best = rs.iter().cloned().fold(0.0, f64::max);
        assert_eq!(prof.r_star, dense_best);
    }

    #[test]
    fn unreachable_threshold() {
        assert!(coverage_altitude(&fig12(0.01), 10.0, &grid(), 1e4).is_err());
    }
}
