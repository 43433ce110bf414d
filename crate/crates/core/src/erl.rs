//! Thermodynamic work bound, speed limit and spin-temperature model.
//!
//! The chain: measurement plus erasure costs at least k_B T 𝓘 of work; if that
//! work is exchanged with the field inside volume V it shows up as a field
//! fluctuation δB = √(2μ₀W/V); moving energy W takes at least πℏ/(2W)
//! (Margolus–Levitin). Combining the three gives (δB)²Vτ/(2μ₀) ≥ (π/2)ℏ.
//!
//! Information is always in nats.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use serde::Serialize;

use crate::error::{non_negative, positive, Error, Result};
use crate::units::constants;

/// The floor of [`erl_quantum`], in units of ℏ.
pub const ERL_FLOOR_HBAR: f64 = FRAC_PI_2;

/// Information content of one bit, in nats.
pub const ONE_BIT_NATS: f64 = LN_2;

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}

/// Inputs of the measurement + erasure work bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkBoundInput {
    bath_temperature: f64,
    mutual_information: f64,
    shannon_entropy: f64,
}

impl WorkBoundInput {
    /// Requires T > 0 and 0 ≤ 𝓘 ≤ H.
    pub fn new(
        bath_temperature: f64,
        mutual_information: f64,
        shannon_entropy: f64,
    ) -> Result<Self> {
        positive("bath temperature", bath_temperature)?;
        non_negative("mutual information", mutual_information)?;
        non_negative("Shannon entropy", shannon_entropy)?;
        if mutual_information > shannon_entropy {
            return Err(Error::invalid(
                "mutual information",
                format!(
                    "{mutual_information} nats exceeds the entropy bound {shannon_entropy} nats"
                ),
            ));
        }
        Ok(Self {
            bath_temperature,
            mutual_information,
            shannon_entropy,
        })
    }

    pub fn bath_temperature(&self) -> f64 {
        self.bath_temperature
    }

    pub fn mutual_information(&self) -> f64 {
        self.mutual_information
    }

    pub fn shannon_entropy(&self) -> f64 {
        self.shannon_entropy
    }

    /// Minimum W_meas + W_eras.
    pub fn min_work(&self) -> f64 {
        constants().k_b * self.bath_temperature * self.mutual_information
    }
}

/// u_B = B²/(2μ₀), J/m³.
pub fn magnetic_energy_density(field: f64) -> f64 {
    field * field / (2.0 * constants().mu_0)
}

/// δB = √(2μ₀W/V): the field fluctuation that stores work W in volume V.
pub fn field_fluctuation_from_work(work: f64, volume: f64) -> Result<f64> {
    let w = non_negative("work", work)?;
    let v = positive("volume", volume)?;
    Ok((2.0 * constants().mu_0 * w / v).sqrt())
}

/// Inverse of [`field_fluctuation_from_work`]: W = (δB)²V/(2μ₀).
pub fn work_from_field_fluctuation(delta_b: f64, volume: f64) -> f64 {
    magnetic_energy_density(delta_b) * volume
}

/// Minimum combined measurement and erasure work, k_B T 𝓘.
pub fn measurement_work_bound(temperature: f64, info_nats: f64) -> Result<f64> {
    let t = positive("temperature", temperature)?;
    let i = non_negative("information", info_nats)?;
    Ok(constants().k_b * t * i)
}

/// Margolus–Levitin minimum time πℏ/(2E) to exchange energy E.
pub fn ml_min_time(energy: f64) -> Result<f64> {
    let e = positive("energy", energy)?;
    Ok(PI * constants().hbar / (2.0 * e))
}

/// (δB)²Vτ/(2μ₀), in units of ℏ. The bound is [`ERL_FLOOR_HBAR`].
pub fn erl_quantum(delta_b: f64, volume: f64, tau: f64) -> Result<f64> {
    non_negative("field fluctuation", delta_b.abs())?;
    let v = positive("volume", volume)?;
    let t = positive("measurement time", tau)?;
    let c = constants();
    Ok(delta_b * delta_b * v * t / (2.0 * c.mu_0 * c.hbar))
}

/// Spin temperature from k_B T_s = μ√N B.
///
/// B = 0 is the infinite-temperature equilibrium and is rejected.
pub fn spin_temperature(atom_count: f64, field: f64, moment: f64) -> Result<f64> {
    let n = at_least_one(atom_count)?;
    let b = positive("field", field)?;
    let mu = positive("magnetic moment", moment)?;
    Ok(mu * n.sqrt() * b / constants().k_b)
}

/// ⟨σ_z⟩ = tanh(μB / 2k_B T_s) for H = −(μB/2)σ_z at spin temperature T_s.
pub fn spin_temp_polarization(spin_temperature: f64, field: f64, moment: f64) -> Result<f64> {
    let t = positive("spin temperature", spin_temperature)?;
    Ok((moment * field / (2.0 * constants().k_b * t)).tanh())
}

/// Standard deviation μB√N/2 of the energy handed over by the field when N
/// atoms are projected onto ±μB/2 with equal probability.
///
/// This equals k_B T_s / 2 with T_s from [`spin_temperature`]; the binomial
/// argument alone would suggest 2k_B T_s = μ√N B instead.
pub fn energy_exchange_std(atom_count: f64, field: f64, moment: f64) -> Result<f64> {
    let n = at_least_one(atom_count)?;
    Ok(moment * field * n.sqrt() / 2.0)
}

/// ERL of a spin-squeezed ensemble: ξ² times the unsqueezed value.
pub fn squeezed_erl(erl_hbar: f64, xi: f64) -> Result<f64> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::invalid(
            "squeezing factor",
            format!("must lie in (0, 1], got {xi}"),
        ));
    }
    Ok(xi * xi * erl_hbar)
}

fn at_least_one(atom_count: f64) -> Result<f64> {
    if atom_count.is_finite() && atom_count >= 1.0 {
        Ok(atom_count)
    } else {
        Err(Error::invalid(
            "atom count",
            format!("must be >= 1, got {atom_count}"),
        ))
    }
}

/// N spins of moment μ in field B.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinEnsemble {
    atom_count: f64,
    magnetic_moment: f64,
    field: f64,
}

impl SpinEnsemble {
    pub fn new(atom_count: f64, magnetic_moment: f64, field: f64) -> Result<Self> {
        at_least_one(atom_count)?;
        positive("magnetic moment", magnetic_moment)?;
        non_negative("field", field)?;
        Ok(Self {
            atom_count,
            magnetic_moment,
            field,
        })
    }

    pub fn spin_temperature(&self) -> Result<f64> {
        spin_temperature(self.atom_count, self.field, self.magnetic_moment)
    }

    pub fn energy_exchange_std(&self) -> f64 {
        self.magnetic_moment * self.field * self.atom_count.sqrt() / 2.0
    }

    /// Polarization at the spin temperature 2k_B T_s = μ√N B, i.e. tanh(1/√N).
    pub fn noise_polarization(&self) -> f64 {
        (1.0 / self.atom_count.sqrt()).tanh()
    }
}
