//! UAV communications toolkit: air-to-ground channels, antennas, propulsion
//! energy, link metrics, path planning, trajectory co-design and a cellular
//! drop simulator.
//!
//! Closed-form models are generic over [`Real`] (`f32` or `f64`); Monte-Carlo
//! and optimization code works in `f64`. The aliases at the crate root fix the
//! scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod antenna;
pub mod cellsim;
pub mod channel;
pub mod data;
pub mod energy;
pub mod error;
pub mod kv;
pub mod lp;
pub mod metrics;
pub mod numerics;
pub mod planner;
pub mod rng;
pub mod scalar;
pub mod trajectory;
pub mod trajopt;
pub mod vec3;

pub use error::{Error, Result};
pub use scalar::Real;
pub use vec3::Vec3;

pub type Position = vec3::Position3D<f64>;
pub type LogDistanceParams = channel::LogDistanceParams<f64>;
pub type ProbLosParams = channel::ProbLosParams<f64>;
pub type ExcessPlParams = channel::ExcessPlParams<f64>;
pub type FixedWingParams = energy::FixedWingParams<f64>;
pub type RotaryWingParams = energy::RotaryWingParams<f64>;
pub type AirframePowerModel = energy::AirframePowerModel<f64>;
pub type Trajectory = trajectory::Trajectory<f64>;
