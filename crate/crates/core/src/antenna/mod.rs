//! Base-station and UAV antenna models: element patterns, downtilted linear
//! and planar arrays, two-lobe approximations and ray-based MIMO channels.

mod array;
mod element;
mod lobes;
mod mimo;

pub use array::{array_gain, ula_weights, ArrayGeometry, UlaConfig, UraConfig};
pub use element::{element_gain, ElementPattern};
pub use lobes::{two_lobe_bs_gain, two_lobe_uav_gain, uav_main_gain, TwoLobeBs, TwoLobeUav};
pub use mimo::{mimo_channel, RayPath};
