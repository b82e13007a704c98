//! Air-to-ground channel models.
//!
//! Closed-form large-scale models are generic over [`Real`](crate::Real).
//! Stochastic sampling ([`sample_channel`], [`excess_pl`]) works in `f64` and
//! draws from explicit [`StreamRng`](crate::rng::StreamRng) handles.
//!
//! All path losses use a 1 m reference distance.

mod fading;
mod geometry;
mod los;
mod model;
mod pathloss;
mod tgpp;

pub use fading::SmallScaleModel;
pub use geometry::{elevation_angle, AngleUnit};
pub use los::{expected_gain, expected_path_loss_db, los_probability, regularized_los, ProbLosParams};
pub use model::{sample_channel, ChannelModel, ChannelRealization};
pub use pathloss::{
    altitude_alpha, direction_adjusted_pl, excess_eta, excess_pl, excess_shadow_variance,
    free_space_gain, log_distance_pl, ExcessPlParams, LogDistanceParams,
};
pub use tgpp::{
    tgpp_los_probability, tgpp_path_loss, LogCoeff, TerrestrialLos, TgppParams, TgppScenario,
};
