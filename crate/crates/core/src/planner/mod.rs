//! Initial path planning and static UAV placement.
//!
//! Tie-breaking is lowest-index-first throughout, so every solver is
//! deterministic.

mod coverage;
mod geom;
mod io;
mod pdp;
mod spiral;
mod tsp;
mod tspn;

pub use coverage::{coverage_altitude, coverage_radius, CoverageProfile};
pub use geom::{convex_hull, smallest_enclosing_circle, Circle};
pub use io::{parse_instance_csv, tour_csv, InstanceRow};
pub use pdp::{solve_pdp, PrecedencePair};
pub use spiral::{spiral_placement, strip_placement};
pub use tsp::{path_length, solve_tsp, Tour, TspMode, WaypointSet, EXACT_TSP_LIMIT};
pub use tspn::{solve_tspn, Neighborhood, TspnResult};
