use crate::error::{Error, Result};

/// Open-loop uplink power control with height-dependent fractional path-loss
/// compensation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlPowerParams {
    pub p_max_dbm: f64,
    pub p0_dbm: f64,
    /// Compensation factor below `height_threshold`.
    pub alpha_low: f64,
    /// Compensation factor at or above `height_threshold`.
    pub alpha_high: f64,
    pub height_threshold: f64,
    pub m_rb: u32,
}

impl Default for UlPowerParams {
    fn default() -> Self {
        Self { p_max_dbm: 23.0, p0_dbm: -85.0, alpha_low: 0.8, alpha_high: 0.7, height_threshold: 100.0, m_rb: 1 }
    }
}

impl UlPowerParams {
    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha_low", self.alpha_low), ("alpha_high", self.alpha_high)] {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::invalid(name, "must lie in [0, 1]"));
            }
        }
        if self.m_rb == 0 {
            return Err(Error::invalid("M_RB", "need at least one resource block"));
        }
        Ok(())
    }

    pub fn alpha_for(&self, height: f64) -> f64 {
        if height < self.height_threshold {
            self.alpha_low
        } else {
            self.alpha_high
        }
    }
}

/// `min(Pmax, 10 log10 M_RB + P0 + alpha * TPL)` in dBm.
pub fn ul_power(p: &UlPowerParams, tpl_db: f64, ue_height: f64) -> Result<f64> {
    p.validate()?;
    let open_loop = 10.0 * f64::from(p.m_rb).log10() + p.p0_dbm + p.alpha_for(ue_height) * tpl_db;
    Ok(open_loop.min(p.p_max_dbm))
}
