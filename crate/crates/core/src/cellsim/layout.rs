use std::f64::consts::PI;

use crate::antenna::{array_gain, UlaConfig, UraConfig};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Sector boresight azimuths (degrees from the x axis).
pub const SECTOR_AZIMUTHS_DEG: [f64; 3] = [30.0, 150.0, 270.0];

#[derive(Debug, Clone, PartialEq)]
pub enum CellAntenna {
    /// Downtilted vertical ULA with a fixed pattern.
    Fixed(UlaConfig),
    /// Planar array steered at the scheduled UE.
    Beamforming(UraConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub id: usize,
    pub site: usize,
    pub pos: Vec3<f64>,
    /// Boresight azimuth (rad).
    pub boresight: f64,
}

/// Two rings of hexagonal sites around the origin, three sectors each.
#[derive(Debug, Clone, PartialEq)]
pub struct CellLayout {
    pub isd: f64,
    pub bs_height: f64,
    pub sites: Vec<Vec3<f64>>,
    pub cells: Vec<Cell>,
    pub antenna: CellAntenna,
}

pub fn build_layout(isd: f64, bs_height: f64, antenna: CellAntenna) -> Result<CellLayout> {
    if !(isd > 0.0) || !isd.is_finite() {
        return Err(Error::invalid("isd", "must be positive"));
    }
    if !(bs_height > 0.0) {
        return Err(Error::invalid("bs_height", "must be positive"));
    }
    let mut sites = vec![Vec3::new(0.0, 0.0, bs_height)];
    let at = |r: f64, deg: f64| {
        let a = deg.to_radians();
        Vec3::new(r * a.cos(), r * a.sin(), bs_height)
    };
    for k in 0..6 {
        sites.push(at(isd, 30.0 + 60.0 * k as f64));
    }
    for k in 0..6 {
        sites.push(at(2.0 * isd, 30.0 + 60.0 * k as f64));
        sites.push(at(3f64.sqrt() * isd, 60.0 + 60.0 * k as f64));
    }
    let cells = sites
        .iter()
        .enumerate()
        .flat_map(|(s, &pos)| {
            SECTOR_AZIMUTHS_DEG
                .iter()
                .enumerate()
                .map(move |(k, az)| Cell { id: 3 * s + k, site: s, pos, boresight: az.to_radians() })
        })
        .collect();
    Ok(CellLayout { isd, bs_height, sites, cells, antenna })
}

fn wrap(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

impl CellLayout {
    /// Elevation above the horizon and azimuth from the sector boresight of
    /// `p` as seen from `cell`.
    pub fn local_angles(&self, cell: usize, p: &Vec3<f64>) -> (f64, f64) {
        let c = &self.cells[cell];
        let d = *p - c.pos;
        let elev = d.z.atan2(d.x.hypot(d.y));
        let azim = wrap(d.y.atan2(d.x) - c.boresight);
        (elev, azim)
    }

    /// Antenna gain (dBi) of `cell` towards `p` while its beam serves `target`.
    /// The fixed pattern ignores `target`.
    pub fn gain_db(&self, cell: usize, p: &Vec3<f64>, target: &Vec3<f64>) -> f64 {
        let (e, a) = self.local_angles(cell, p);
        match &self.antenna {
            CellAntenna::Fixed(ula) => array_gain(e, a, ula),
            CellAntenna::Beamforming(ura) => {
                let (te, ta) = self.local_angles(cell, target);
                ura.gain_db(e, a, &ura.steer(te, ta))
            }
        }
    }

    /// Indices of the `k` sites closest to `p` in the horizontal plane.
    pub fn nearest_sites(&self, p: &Vec3<f64>, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.sites.len()).collect();
        idx.sort_by(|&a, &b| {
            let da = self.sites[a].horizontal_distance(p);
            let db = self.sites[b].horizontal_distance(p);
            da.total_cmp(&db).then(a.cmp(&b))
        });
        idx.truncate(k);
        idx
    }
}
