//! NV-diamond sensors: the electron spin fully relaxes each cycle, so 𝓘 = ln 2.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{non_negative, positive, Result};
use crate::units::constants;

/// Optimal ERL k_B T ln 2 · τ / ħ.
pub fn diamond_erl(temperature: f64, tau: f64) -> Result<f64> {
    let t = non_negative("temperature", temperature)?;
    let tau = non_negative("relaxation time", tau)?;
    let c = constants();
    Ok(c.k_b * t * LN_2 * tau / c.hbar)
}

/// ERL per unit bandwidth of a white-noise-limited sensor, psd² V / (2μ₀ħ).
pub fn measured_erl_from_psd(psd: f64, volume: f64) -> Result<f64> {
    let psd = non_negative("noise density", psd)?;
    let v = positive("volume", volume)?;
    let c = constants();
    Ok(psd * psd * v / (2.0 * c.mu_0 * c.hbar))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiamondSpec {
    pub bath_temperature: f64,
    pub relaxation_time: f64,
    /// T/√Hz
    pub noise_density: f64,
    /// m³
    pub sensing_volume: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiamondReport {
    pub optimal_erl_hbar: f64,
    pub measured_erl_hbar: f64,
    /// measured / optimal
    pub headroom: f64,
}

impl DiamondSpec {
    pub fn new(
        bath_temperature: f64,
        relaxation_time: f64,
        noise_density: f64,
        sensing_volume: f64,
    ) -> Result<Self> {
        Ok(Self {
            bath_temperature: positive("temperature", bath_temperature)?,
            relaxation_time: positive("relaxation time", relaxation_time)?,
            noise_density: positive("noise density", noise_density)?,
            sensing_volume: positive("volume", sensing_volume)?,
        })
    }

    pub fn report(&self) -> Result<DiamondReport> {
        let optimal = diamond_erl(self.bath_temperature, self.relaxation_time)?;
        let measured = measured_erl_from_psd(self.noise_density, self.sensing_volume)?;
        Ok(DiamondReport {
            optimal_erl_hbar: optimal,
            measured_erl_hbar: measured,
            headroom: measured / optimal,
        })
    }
}
