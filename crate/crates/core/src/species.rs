//! Alkali species data and the single-atom quantities derived from it.
//!
//! Species records come from a JSON document:
//!
//! ```json
//! {"species": [{"name": "41K", "nuclear_spin": "3/2", "mass_amu": 40.96,
//!               "sd_cross_section_cm2": 6.0e-19, "reference_temperature_K": 453.0}]}
//! ```
//!
//! The bundled cross sections are not literature values: they were obtained by
//! inverting the reference field-noise values at n = 10¹⁴ cm⁻³, V = 10 cm³
//! (see [`crate::sensors::invert_sigma_v`]), with the velocity evaluated at
//! `reference_temperature_K`. Only the product σ_sd·v̄ at that temperature is
//! constrained by the calibration.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};
use crate::units::constants;

const BUILTIN_SPECIES: &str = include_str!("../data/species.json");

/// Electron spin of the alkali ground state.
const ELECTRON_SPIN_SQ: f64 = 0.75; // S(S+1), S = 1/2

/// A non-negative half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger(u32);

impl HalfInteger {
    pub const fn from_twice(twice: u32) -> Self {
        Self(twice)
    }

    pub fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Accepts only exact multiples of 1/2.
    pub fn from_f64(v: f64) -> Result<Self> {
        let twice = 2.0 * v;
        if !v.is_finite() || v < 0.0 || twice.fract() != 0.0 || twice > f64::from(u32::MAX) {
            return Err(Error::invalid(
                "nuclear spin",
                format!("{v} is not a non-negative half-integer"),
            ));
        }
        Ok(Self(twice as u32))
    }
}

impl FromStr for HalfInteger {
    type Err = Error;

    /// Parses `"0"`, `"1"`, `"3/2"`, `"7/2"`, ... exactly.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::invalid(
                "nuclear spin",
                format!("'{s}' is not a half-integer fraction such as \"3/2\""),
            )
        };
        let s = s.trim();
        match s.split_once('/') {
            None => s
                .parse::<u32>()
                .ok()
                .and_then(|v| v.checked_mul(2))
                .map(Self)
                .ok_or_else(bad),
            Some((num, den)) => {
                let num: u32 = num.trim().parse().map_err(|_| bad())?;
                match den.trim().parse::<u32>().map_err(|_| bad())? {
                    1 => num.checked_mul(2).map(Self).ok_or_else(bad),
                    2 => Ok(Self(num)),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Nuclear slowing-down factor q = [S(S+1) + I(I+1)] / S(S+1) for S = 1/2.
pub fn slowing_factor(nuclear_spin: HalfInteger) -> f64 {
    let i = nuclear_spin.value();
    (ELECTRON_SPIN_SQ + i * (i + 1.0)) / ELECTRON_SPIN_SQ
}

/// Effective atomic magnetic moment μ_B / q.
pub fn magnetic_moment(slowing_factor: f64) -> Result<f64> {
    if !(slowing_factor.is_finite() && slowing_factor >= 1.0) {
        return Err(Error::invalid(
            "slowing factor",
            format!("must be >= 1, got {slowing_factor}"),
        ));
    }
    Ok(constants().mu_b / slowing_factor)
}

/// Mean relative speed of two identical colliding atoms,
/// v̄ = √(8 k_B T / (π m_red)) with m_red = m/2.
pub fn mean_relative_velocity(mass_kg: f64, temperature_k: f64) -> Result<f64> {
    let m = positive("atomic mass", mass_kg)?;
    let t = positive("temperature", temperature_k)?;
    let reduced = m / 2.0;
    Ok((8.0 * constants().k_b * t / (PI * reduced)).sqrt())
}

/// Spin-destruction relaxation time τ = 1/(n σ_sd v̄).
pub fn sd_relaxation_time(number_density: f64, sigma_sd: f64, v_bar: f64) -> Result<f64> {
    let n = positive("number density", number_density)?;
    let s = positive("spin-destruction cross section", sigma_sd)?;
    let v = positive("relative velocity", v_bar)?;
    Ok(1.0 / (n * s * v))
}

/// One entry of the species data file, in file units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesRecord {
    pub name: String,
    pub nuclear_spin: String,
    pub mass_amu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sd_cross_section_cm2: Option<f64>,
    #[serde(
        rename = "reference_temperature_K",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub reference_temperature_k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesFile {
    pub species: Vec<SpeciesRecord>,
}

/// An atomic species, SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    name: String,
    nuclear_spin: HalfInteger,
    mass: f64,
    /// σ_sd in m², absent until calibrated.
    sd_cross_section: Option<f64>,
    /// Temperature at which σ_sd·v̄ was calibrated.
    reference_temperature: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeciesDerived {
    pub slowing_factor: f64,
    /// J/T
    pub magnetic_moment: f64,
    /// m/s, at the reference temperature
    pub mean_relative_velocity: Option<f64>,
}

impl Species {
    pub fn new(name: impl Into<String>, nuclear_spin: HalfInteger, mass_kg: f64) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            nuclear_spin,
            mass: positive("atomic mass", mass_kg)?,
            sd_cross_section: None,
            reference_temperature: None,
        })
    }

    /// Attach a spin-destruction cross section (m²) calibrated at `reference_temperature` (K).
    pub fn with_sd_cross_section(
        mut self,
        sigma_sd: f64,
        reference_temperature: f64,
    ) -> Result<Self> {
        self.sd_cross_section = Some(positive("spin-destruction cross section", sigma_sd)?);
        self.reference_temperature =
            Some(positive("reference temperature", reference_temperature)?);
        Ok(self)
    }

    pub fn from_record(rec: &SpeciesRecord) -> Result<Self> {
        let spin: HalfInteger = rec.nuclear_spin.parse()?;
        let amu = positive("mass_amu", rec.mass_amu)?;
        let species = Species::new(rec.name.clone(), spin, amu * constants().amu)?;
        match (rec.sd_cross_section_cm2, rec.reference_temperature_k) {
            (Some(cm2), Some(t)) => species.with_sd_cross_section(cm2 * 1e-4, t),
            (None, _) => Ok(species),
            (Some(_), None) => Err(Error::SpeciesData(format!(
                "species '{}' has a cross section but no reference_temperature_K",
                rec.name
            ))),
        }
    }

    pub fn to_record(&self) -> SpeciesRecord {
        SpeciesRecord {
            name: self.name.clone(),
            nuclear_spin: self.nuclear_spin.to_string(),
            mass_amu: self.mass / constants().amu,
            sd_cross_section_cm2: self.sd_cross_section.map(|s| s * 1e4),
            reference_temperature_k: self.reference_temperature,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Element symbol with the mass number stripped, e.g. `"Cs"` for `"133Cs"`.
    pub fn element(&self) -> &str {
        self.name.trim_start_matches(|c: char| c.is_ascii_digit())
    }

    pub fn nuclear_spin(&self) -> HalfInteger {
        self.nuclear_spin
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn sd_cross_section(&self) -> Option<f64> {
        self.sd_cross_section
    }

    pub fn reference_temperature(&self) -> Option<f64> {
        self.reference_temperature
    }

    pub fn slowing_factor(&self) -> f64 {
        slowing_factor(self.nuclear_spin)
    }

    pub fn magnetic_moment(&self) -> f64 {
        constants().mu_b / self.slowing_factor()
    }

    pub fn derived(&self) -> SpeciesDerived {
        SpeciesDerived {
            slowing_factor: self.slowing_factor(),
            magnetic_moment: self.magnetic_moment(),
            mean_relative_velocity: self
                .reference_temperature
                .and_then(|t| mean_relative_velocity(self.mass, t).ok()),
        }
    }
}

/// An immutable set of species with unique names.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    species: Vec<Species>,
}

impl Catalog {
    /// The bundled ⁴¹K, ⁸⁷Rb, ¹³³Cs catalog.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN_SPECIES).expect("bundled species file is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpeciesFile =
            serde_json::from_str(text).map_err(|e| Error::SpeciesData(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &SpeciesFile) -> Result<Self> {
        let species = file
            .species
            .iter()
            .map(Species::from_record)
            .collect::<Result<Vec<_>>>()?;
        Self::new(species)
    }

    pub fn new(species: Vec<Species>) -> Result<Self> {
        for (i, s) in species.iter().enumerate() {
            if species[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::SpeciesData(format!(
                    "duplicate species '{}'",
                    s.name
                )));
            }
        }
        Ok(Self { species })
    }

    pub fn to_file(&self) -> SpeciesFile {
        SpeciesFile {
            species: self.species.iter().map(Species::to_record).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &Species> {
        self.species.iter()
    }

    pub fn len(&self) -> usize {
        self.species.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
    }

    /// Look up by full name (`"133Cs"`) or, when unambiguous, by element (`"Cs"`).
    /// Matching is case-insensitive.
    pub fn get(&self, key: &str) -> Result<&Species> {
        let key = key.trim();
        if let Some(s) = self
            .species
            .iter()
            .find(|s| s.name.eq_ignore_ascii_case(key))
        {
            return Ok(s);
        }
        let mut by_element = self
            .species
            .iter()
            .filter(|s| s.element().eq_ignore_ascii_case(key));
        match (by_element.next(), by_element.next()) {
            (Some(s), None) => Ok(s),
            _ => Err(Error::UnknownSpecies(key.to_string())),
        }
    }
}
