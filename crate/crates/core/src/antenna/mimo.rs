use nalgebra::DMatrix;
use num_complex::Complex64;

use super::array::ArrayGeometry;
use crate::error::{Error, Result};

/// One propagation ray with departure/arrival directions (rad).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayPath {
    pub aoa_elev: f64,
    pub aoa_azim: f64,
    pub aod_elev: f64,
    pub aod_azim: f64,
    pub amplitude: Complex64,
}

/// `H = sqrt(beta) sum_l alpha_l a_r(aoa_l) a_t(aod_l)^H`, an `N x M` matrix.
pub fn mimo_channel(
    paths: &[RayPath],
    beta: f64,
    rx: &ArrayGeometry,
    tx: &ArrayGeometry,
) -> Result<DMatrix<Complex64>> {
    if paths.is_empty() {
        return Err(Error::invalid("paths", "at least one path is required"));
    }
    if !(beta >= 0.0) {
        return Err(Error::invalid("beta", "must be non-negative"));
    }
    let (n, m) = (rx.len(), tx.len());
    let mut h = DMatrix::<Complex64>::zeros(n, m);
    for p in paths {
        if ![p.aoa_elev, p.aoa_azim, p.aod_elev, p.aod_azim].iter().all(|x| x.is_finite()) {
            return Err(Error::invalid("paths", "angles must be finite"));
        }
        let a = rx.response(p.aoa_elev, p.aoa_azim);
        let b = tx.response(p.aod_elev, p.aod_azim);
        for i in 0..n {
            for j in 0..m {
                h[(i, j)] += p.amplitude * a[i] * b[j].conj();
            }
        }
    }
    Ok(h * Complex64::new(beta.sqrt(), 0.0))
}
