//! Downlink drop simulator for a hexagonal cellular network serving ground
//! and aerial UEs, plus uplink power control.

mod drop;
mod layout;
mod ulpower;

pub use drop::{
    associate, association_csv, association_histogram, cdf_csv, deciles, downlink_sinr, downlink_sinr_with,
    nearest_sites_fraction, rsrp, run_drop, sum_rate_samples, Drop, DropOutcome, DropState, Scenario, Ue,
};
pub use layout::{build_layout, Cell, CellAntenna, CellLayout, SECTOR_AZIMUTHS_DEG};
pub use ulpower::{ul_power, UlPowerParams};
