//! Joint trajectory and communication design: time and path grids, flight
//! constraints, concave rate bounds, the TDMA scheduling LP and the
//! SCA / block-coordinate solvers.

mod constraints;
mod grid;
mod instance;
mod schedule;
mod solver;
mod surrogate;

pub use constraints::{ConstraintSet, NoFlyBox, Obstacle};
pub use grid::{path_discretize, time_discretize, PathGrid, TimeGrid};
pub use instance::{shares_csv, trajectory_csv, CodesignInstance, FleetPaths, User, Utility};
pub use schedule::{realized_min, schedule_greedy, schedule_lp, schedule_lp_grouped, Schedule};
pub use solver::{
    bcd_codesign, best_shares, initial_paths, sca, solve_surrogate, CodesignOutcome, ScaOutcome, TraceEntry, FEAS_TOL,
};
pub use surrogate::{
    distance_surrogate, minspeed_surrogate, rate_at_distance, rate_surrogate, rate_surrogate_grad,
    surrogate_coefficients, SurrogateMode,
};

use crate::error::Result;
use crate::kv::KvFile;

const CANONICAL: &str = include_str!("../../data/canonical.inst");

impl CodesignInstance {
    /// Four users on the corners of a 1 km square served by one UAV at 100 m
    /// that starts and ends above the centre.
    pub fn canonical() -> Result<Self> {
        Self::from_kv(&KvFile::parse(CANONICAL)?)
    }
}
