//! Alkali vapor cells limited by spin-destruction (SD) collisions.
//!
//! With 𝓘 = ln 2 exchanged at the spin temperature k_B T_s = μ√N δB over the
//! SD relaxation time τ = 1/(nσ_sd v̄), the speed limit gives
//!
//! ```text
//! δB ≥ (π / 2 ln 2) · ħ σ_sd v̄ √N / (μ V)
//! ERL = (δB)² V τ / (2μ₀) ≥ ħ · (π² / 8 ln² 2) · ħ σ_sd v̄ / (μ₀ μ²)
//! ```
//!
//! The same floor reads δB = (2/3) κ μ₀ μ √N / V with the dipolar enhancement
//! κ = (3π / 4 ln 2) · ħ σ_sd v̄ / (μ₀ μ²).

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use crate::error::{positive, Error, Result};
use crate::species::{mean_relative_velocity, Species};
use crate::units::constants;

/// Number density of the reference cells, m⁻³ (10¹⁴ cm⁻³).
pub const REFERENCE_DENSITY: f64 = 1e20;
/// Volume of the reference cells, m³ (10 cm³).
pub const REFERENCE_VOLUME: f64 = 1e-5;

/// A published reference value at [`REFERENCE_DENSITY`], [`REFERENCE_VOLUME`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceRow {
    pub species: &'static str,
    /// Field noise floor, T.
    pub delta_b: f64,
    /// Predicted ERL, ħ.
    pub erl_hbar: f64,
}

/// Field-noise floor and ERL for ⁴¹K, ⁸⁷Rb, ¹³³Cs at n = 10¹⁴ cm⁻³, V = 10 cm³,
/// as published. The δB column is quoted to one significant figure.
pub const REFERENCE_ROWS: [ReferenceRow; 3] = [
    ReferenceRow {
        species: "41K",
        delta_b: 2e-17,
        erl_hbar: 4.0,
    },
    ReferenceRow {
        species: "87Rb",
        delta_b: 10e-17,
        erl_hbar: 25.0,
    },
    ReferenceRow {
        species: "133Cs",
        delta_b: 1000e-17,
        erl_hbar: 6054.0,
    },
];

const FLOOR_PREFACTOR: f64 = PI / (2.0 * LN_2);

#[derive(Debug, Clone, PartialEq)]
pub struct VaporCell {
    species: Species,
    number_density: f64,
    volume: f64,
    cell_temperature: f64,
}

impl VaporCell {
    pub fn new(
        species: Species,
        number_density: f64,
        volume: f64,
        cell_temperature: f64,
    ) -> Result<Self> {
        let n = positive("number density", number_density)?;
        let v = positive("volume", volume)?;
        let t = positive("cell temperature", cell_temperature)?;
        if n * v < 1.0 {
            return Err(Error::invalid(
                "vapor cell",
                format!("holds {} atoms; at least one is required", n * v),
            ));
        }
        Ok(Self {
            species,
            number_density: n,
            volume: v,
            cell_temperature: t,
        })
    }

    /// A cell at the temperature the species' cross section was calibrated at.
    pub fn at_reference_temperature(
        species: Species,
        number_density: f64,
        volume: f64,
    ) -> Result<Self> {
        let t = species
            .reference_temperature()
            .ok_or_else(|| Error::MissingCalibration(species.name().to_string()))?;
        Self::new(species, number_density, volume, t)
    }

    pub fn species(&self) -> &Species {
        &self.species
    }

    pub fn number_density(&self) -> f64 {
        self.number_density
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn cell_temperature(&self) -> f64 {
        self.cell_temperature
    }

    pub fn atom_count(&self) -> f64 {
        self.number_density * self.volume
    }
}

/// Everything [`atomic_floor`] derives for one cell. SI units, ERL in ħ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtomicErlReport {
    pub atom_count: f64,
    /// m/s
    pub mean_relative_velocity: f64,
    /// σ_sd·v̄, m³/s
    pub sigma_v: f64,
    /// τ, s
    pub relaxation_time: f64,
    /// T
    pub delta_b_floor: f64,
    pub erl_hbar: f64,
    pub kappa: f64,
    pub kappa_bare: f64,
    /// T_s at B = δB, K
    pub spin_temperature: f64,
    pub correlation_atoms: f64,
    /// m³
    pub correlation_volume: f64,
    /// Mean time between collisions of one atom, s
    pub collision_time: f64,
    /// Spin phase per SD collision, rad
    pub sd_phase: f64,
    /// ħ/(μτ√N), T
    pub delta_b_uncertainty_check: f64,
    /// δB√τ, T/√Hz
    pub psd: f64,
}

/// Field-noise floor, ERL and correlation picture for a vapor cell.
pub fn atomic_floor(cell: &VaporCell) -> Result<AtomicErlReport> {
    let species = cell.species();
    let sigma = species
        .sd_cross_section()
        .ok_or_else(|| Error::MissingCalibration(species.name().to_string()))?;
    let v_bar = mean_relative_velocity(species.mass(), cell.cell_temperature())?;
    Ok(floor_from_parts(
        species.magnetic_moment(),
        cell.number_density(),
        cell.volume(),
        sigma,
        v_bar,
    ))
}

fn floor_from_parts(mu: f64, n: f64, volume: f64, sigma: f64, v_bar: f64) -> AtomicErlReport {
    let c = constants();
    let atoms = n * volume;
    let sqrt_n = atoms.sqrt();
    let sigma_v = sigma * v_bar;
    let tau = 1.0 / (n * sigma_v);

    let delta_b = FLOOR_PREFACTOR * c.hbar * sigma_v * sqrt_n / (mu * volume);
    let kappa_bare = c.hbar * sigma_v / (c.mu_0 * mu * mu);
    let erl_hbar = FLOOR_PREFACTOR * FLOOR_PREFACTOR / 2.0 * kappa_bare;
    let kappa = 3.0 * PI / (4.0 * LN_2) * kappa_bare;

    let inter_atomic = n.cbrt().recip();
    // N_c = (ħv̄/μ₀μ²)² σ_sd n^(-2/3)
    let correlation_atoms =
        (c.hbar * v_bar / (c.mu_0 * mu * mu)).powi(2) * sigma * inter_atomic * inter_atomic;
    let collision_time = inter_atomic / v_bar;

    AtomicErlReport {
        atom_count: atoms,
        mean_relative_velocity: v_bar,
        sigma_v,
        relaxation_time: tau,
        delta_b_floor: delta_b,
        erl_hbar,
        kappa,
        kappa_bare,
        spin_temperature: mu * sqrt_n * delta_b / c.k_b,
        correlation_atoms,
        correlation_volume: correlation_atoms / n,
        collision_time,
        sd_phase: (collision_time / tau).sqrt(),
        delta_b_uncertainty_check: c.hbar / (mu * tau * sqrt_n),
        psd: delta_b * tau.sqrt(),
    }
}

/// σ_sd·v̄ that makes the floor of an N-atom cell of volume V equal `delta_b`.
///
/// σ_sd·v̄ = δB μ V · 2 ln 2 / (π ħ √N).
pub fn invert_sigma_v(delta_b: f64, moment: f64, volume: f64, atom_count: f64) -> Result<f64> {
    let db = positive("field noise", delta_b)?;
    let mu = positive("magnetic moment", moment)?;
    let v = positive("volume", volume)?;
    let n = positive("atom count", atom_count)?;
    Ok(db * mu * v / (FLOOR_PREFACTOR * constants().hbar * n.sqrt()))
}

/// Give `species` the cross section that reproduces `delta_b` for a cell of
/// density `number_density` and volume `volume` at `reference_temperature`.
pub fn calibrate_species(
    species: Species,
    delta_b: f64,
    number_density: f64,
    volume: f64,
    reference_temperature: f64,
) -> Result<Species> {
    let n = positive("number density", number_density)?;
    let sigma_v = invert_sigma_v(delta_b, species.magnetic_moment(), volume, n * volume)?;
    let v_bar = mean_relative_velocity(species.mass(), reference_temperature)?;
    species.with_sd_cross_section(sigma_v / v_bar, reference_temperature)
}

/// Field-noise spectral density when δB is spread over the bandwidth 1/τ.
pub fn atomic_psd(delta_b: f64, tau: f64) -> Result<f64> {
    let t = positive("relaxation time", tau)?;
    Ok(delta_b * t.sqrt())
}

/// Factor by which the floor changes between two cells of the same species
/// and temperature: δB ∝ √(n/V).
pub fn delta_b_scaling(from: (f64, f64), to: (f64, f64)) -> Result<f64> {
    let (n0, v0) = (
        positive("number density", from.0)?,
        positive("volume", from.1)?,
    );
    let (n1, v1) = (positive("number density", to.0)?, positive("volume", to.1)?);
    Ok(((n1 / n0) * (v0 / v1)).sqrt())
}
