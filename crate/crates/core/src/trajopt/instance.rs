use std::fmt::Write as _;
use std::str::FromStr;

use super::constraints::{ConstraintSet, NoFlyBox, Obstacle};
use super::grid::{time_discretize, TimeGrid};
use super::surrogate::{rate_at_distance, SurrogateMode};
use crate::error::{Error, Result};
use crate::kv::KvFile;
use crate::scalar::from_db;
use crate::vec3::Vec3;

/// Ground user served by UAV `uav`; `gamma` is the linear reference SNR at
/// 1 m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct User {
    pub pos: Vec3<f64>,
    pub gamma: f64,
    pub uav: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Utility {
    #[default]
    MinRate,
    SumRate,
}

impl FromStr for Utility {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min_rate" | "maxmin" | "max_min" => Ok(Self::MinRate),
            "sum_rate" | "sum" => Ok(Self::SumRate),
            other => Err(Error::parse("utility", format!("unknown utility `{other}`"))),
        }
    }
}

/// Slot positions per UAV: `paths[j][n]` for `n = 0..=N`.
pub type FleetPaths = Vec<Vec<Vec3<f64>>>;

/// Joint trajectory and TDMA scheduling problem on a uniform time grid.
///
/// Slot `n` (0-based) is served from the UAV position at the end of the
/// slot, `paths[j][n + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodesignInstance {
    pub users: Vec<User>,
    pub alpha: f64,
    pub horizon: f64,
    pub grid: TimeGrid<f64>,
    pub constraints: ConstraintSet,
    pub utility: Utility,
    pub surrogate: SurrogateMode,
    pub shares: Vec<Vec<f64>>,
    pub tol: f64,
    pub max_iter: usize,
}

impl CodesignInstance {
    /// Builds the instance with `N = ceil(T Vmax / Delta_max)` slots and equal
    /// shares among the users of each UAV.
    pub fn new(users: Vec<User>, alpha: f64, horizon: f64, delta_max: f64, constraints: ConstraintSet) -> Result<Self> {
        let grid = time_discretize(horizon, constraints.v_max, delta_max)?;
        let mut inst = Self {
            users,
            alpha,
            horizon,
            grid,
            constraints,
            utility: Utility::MinRate,
            surrogate: SurrogateMode::Distance,
            shares: Vec::new(),
            tol: 1e-4,
            max_iter: 100,
        };
        inst.shares = inst.equal_shares();
        inst.validate()?;
        Ok(inst)
    }

    pub fn slots(&self) -> usize {
        self.grid.n
    }

    pub fn groups(&self) -> Vec<usize> {
        self.users.iter().map(|u| u.uav).collect()
    }

    pub fn equal_shares(&self) -> Vec<Vec<f64>> {
        self.users
            .iter()
            .map(|u| {
                let peers = self.users.iter().filter(|v| v.uav == u.uav).count() as f64;
                vec![1.0 / peers; self.slots()]
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.constraints.validate()?;
        if self.users.is_empty() {
            return Err(Error::invalid("users", "need at least one user"));
        }
        if self.users.iter().any(|u| !(u.gamma > 0.0) || !u.pos.is_finite()) {
            return Err(Error::invalid("gamma_dB", "users need finite positions and positive SNR"));
        }
        if self.users.iter().any(|u| u.uav >= self.constraints.uav_count()) {
            return Err(Error::invalid("assoc", "user assigned to a missing UAV"));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::invalid("alpha", "must be positive"));
        }
        if self.shares.len() != self.users.len() || self.shares.iter().any(|s| s.len() != self.slots()) {
            return Err(Error::invalid("shares", "need one share per user and slot"));
        }
        if self.shares.iter().flatten().any(|t| !(*t >= 0.0 && *t <= 1.0)) {
            return Err(Error::invalid("shares", "must lie in [0, 1]"));
        }
        for j in 0..self.constraints.uav_count() {
            for n in 0..self.slots() {
                let s: f64 = self.users.iter().zip(&self.shares).filter(|(u, _)| u.uav == j).map(|(_, t)| t[n]).sum();
                if s > 1.0 + 1e-12 {
                    return Err(Error::invalid("shares", format!("slot {n} of UAV {j} oversubscribed")));
                }
            }
        }
        Ok(())
    }

    /// Reads the key-value instance format. Required keys: `users`,
    /// `gamma_dB`, `alpha`, `T`, `Vmax`, `Delta_max`, `Hmin`, `Hmax`, `q_I`,
    /// `q_F`.
    pub fn from_kv(kv: &KvFile) -> Result<Self> {
        let positions = kv.get_points("users")?;
        let gammas_db = kv.get_list_f64("gamma_dB")?;
        if gammas_db.len() != 1 && gammas_db.len() != positions.len() {
            return Err(Error::parse("gamma_dB", "give one value or one per user"));
        }
        let assoc: Vec<usize> = if kv.contains("assoc") {
            kv.get_list_f64("assoc")?.into_iter().map(|a| a as usize).collect()
        } else {
            vec![0; positions.len()]
        };
        if assoc.len() != positions.len() {
            return Err(Error::parse("assoc", "need one UAV index per user"));
        }
        let users = positions
            .iter()
            .enumerate()
            .map(|(k, &pos)| User { pos, gamma: from_db(gammas_db[k.min(gammas_db.len() - 1)]), uav: assoc[k] })
            .collect();
        let grid_kind = kv.raw("grid").unwrap_or("time");
        if grid_kind != "time" {
            return Err(Error::parse("grid", "only the time grid is supported by the solver"));
        }
        let constraints = ConstraintSet {
            h_min: kv.get_f64("Hmin")?,
            h_max: kv.get_f64("Hmax")?,
            q_start: kv.get_points("q_I")?,
            q_end: kv.get_points("q_F")?,
            v_min: kv.get_f64_or("Vmin", 0.0)?,
            v_max: kv.get_f64("Vmax")?,
            a_max: if kv.contains("a_max") { Some(kv.get_f64("a_max")?) } else { None },
            obstacles: kv
                .get_rows("obstacles", 4)?
                .into_iter()
                .map(|r| Obstacle { center: Vec3::new(r[0], r[1], r[2]), clearance: r[3] })
                .collect(),
            d_min_uav: kv.get_f64_or("D2", 0.0)?,
            no_fly: kv
                .get_rows("no_fly", 6)?
                .into_iter()
                .map(|r| NoFlyBox { lo: Vec3::new(r[0], r[1], r[2]), hi: Vec3::new(r[3], r[4], r[5]) })
                .collect(),
        };
        let mut inst = Self::new(users, kv.get_f64("alpha")?, kv.get_f64("T")?, kv.get_f64("Delta_max")?, constraints)
            .map_err(|e| match e {
                Error::InvalidParameter { name, reason } => Error::parse(name, reason),
                other => other,
            })?;
        inst.utility = kv.get_or("utility", Utility::MinRate)?;
        inst.surrogate = kv.get_or("surrogate", SurrogateMode::Distance)?;
        inst.tol = kv.get_f64_or("tol", 1e-4)?;
        inst.max_iter = kv.get_or("max_iter", 100usize)?;
        if !(inst.tol > 0.0) || inst.max_iter == 0 {
            return Err(Error::parse("tol", "tol and max_iter must be positive"));
        }
        Ok(inst)
    }

    /// True per-slot rates `R[k][n]` along `paths`.
    pub fn slot_rates(&self, paths: &FleetPaths) -> Vec<Vec<f64>> {
        self.users
            .iter()
            .map(|u| {
                paths[u.uav][1..]
                    .iter()
                    .map(|q| rate_at_distance(q.distance(&u.pos).max(1e-9), u.gamma, self.alpha))
                    .collect()
            })
            .collect()
    }

    /// Per-user average rate `(1/N) sum_n tau[k][n] R[k][n]`.
    pub fn user_rates(&self, paths: &FleetPaths, shares: &[Vec<f64>]) -> Vec<f64> {
        let n = self.slots() as f64;
        self.slot_rates(paths)
            .iter()
            .zip(shares)
            .map(|(r, t)| r.iter().zip(t).map(|(a, b)| a * b).sum::<f64>() / n)
            .collect()
    }

    pub fn utility_value(&self, paths: &FleetPaths, shares: &[Vec<f64>]) -> f64 {
        combine(self.utility, &self.user_rates(paths, shares))
    }
}

pub(crate) fn combine(u: Utility, rates: &[f64]) -> f64 {
    match u {
        Utility::MinRate => rates.iter().copied().fold(f64::INFINITY, f64::min),
        Utility::SumRate => rates.iter().sum(),
    }
}

/// `n,t_s,x,y,z,vx,vy,vz,uav`; the velocity is that of the slot starting at
/// `n` (the last row repeats the final slot).
pub fn trajectory_csv(paths: &FleetPaths, delta_t: f64) -> String {
    let mut s = String::from("n,t_s,x,y,z,vx,vy,vz,uav\n");
    for (j, q) in paths.iter().enumerate() {
        for (n, p) in q.iter().enumerate() {
            let m = n.min(q.len() - 2);
            let v = (q[m + 1] - q[m]) / delta_t;
            let _ = writeln!(s, "{n},{},{},{},{},{},{},{},{j}", n as f64 * delta_t, p.x, p.y, p.z, v.x, v.y, v.z);
        }
    }
    s
}

/// `n,k,tau` for every slot and user.
pub fn shares_csv(shares: &[Vec<f64>]) -> String {
    let mut s = String::from("n,k,tau\n");
    let slots = shares.first().map_or(0, Vec::len);
    for n in 0..slots {
        for (k, t) in shares.iter().enumerate() {
            let _ = writeln!(s, "{n},{k},{}", t[n]);
        }
    }
    s
}
