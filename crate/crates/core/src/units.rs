//! Physical constants and a small runtime-checked dimension layer.
//!
//! Every quantity is stored in SI. Non-SI units (cm⁻³, pG/√Hz, μs, ...) only
//! appear when parsing user input or formatting output, through [`Unit`].
//!
//! Dimensions are exponent vectors over the SI base dimensions
//! `[length, mass, time, current, temperature]`, stored in half-integer steps
//! so amplitude spectral densities (T/√Hz = T·s^½) are representable.

use std::fmt;
use std::ops::{Div, Mul};

use serde::Serialize;
use thiserror::Error;

/// Fixed CODATA 2018 values, all SI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s). CODATA 2018, exact by SI definition.
    pub hbar: f64,
    /// Boltzmann constant (J/K). CODATA 2018, exact by SI definition.
    pub k_b: f64,
    /// Vacuum magnetic permeability (N/A²). CODATA 2018 measured value.
    pub mu_0: f64,
    /// Bohr magneton (J/T). CODATA 2018.
    pub mu_b: f64,
    /// Magnetic flux quantum h/2e (Wb). CODATA 2018, exact by SI definition.
    pub phi_0: f64,
    /// Unified atomic mass unit (kg). CODATA 2018.
    pub amu: f64,
}

static CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    k_b: 1.380_649e-23,
    mu_0: 1.256_637_062_12e-6,
    mu_b: 9.274_010_078_3e-24,
    phi_0: 2.067_833_848e-15,
    amu: 1.660_539_066_60e-27,
};

/// The constant table shared by every formula in the crate.
pub fn constants() -> &'static PhysicalConstants {
    &CONSTANTS
}

impl PhysicalConstants {
    pub fn hbar_q(&self) -> Quantity {
        Quantity::new(self.hbar, Dimension::ACTION)
    }

    pub fn k_b_q(&self) -> Quantity {
        Quantity::new(self.k_b, Dimension::ENERGY.div(Dimension::TEMPERATURE))
    }

    pub fn mu_0_q(&self) -> Quantity {
        Quantity::new(self.mu_0, Dimension::PERMEABILITY)
    }

    pub fn mu_b_q(&self) -> Quantity {
        Quantity::new(self.mu_b, Dimension::MAGNETIC_MOMENT)
    }

    pub fn phi_0_q(&self) -> Quantity {
        Quantity::new(self.phi_0, Dimension::MAGNETIC_FIELD.mul(Dimension::AREA))
    }

    pub fn amu_q(&self) -> Quantity {
        Quantity::new(self.amu, Dimension::MASS)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnitError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch {
        expected: Dimension,
        found: Dimension,
    },
    #[error("unknown unit '{0}'")]
    UnknownUnit(String),
    #[error("cannot parse quantity '{0}': expected a number followed by a unit, e.g. 1e14/cm3")]
    Malformed(String),
    #[error("quantity '{0}' is missing a unit suffix")]
    MissingUnit(String),
    #[error("square root of {0} is not representable")]
    OddRoot(Dimension),
}

const BASE_SYMBOLS: [&str; 5] = ["m", "kg", "s", "A", "K"];

/// Exponents of `[m, kg, s, A, K]`, each stored doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dimension {
    half_exponents: [i8; 5],
}

impl Dimension {
    const fn from_exponents(m: i8, kg: i8, s: i8, a: i8, k: i8) -> Self {
        Self {
            half_exponents: [2 * m, 2 * kg, 2 * s, 2 * a, 2 * k],
        }
    }

    pub const DIMENSIONLESS: Dimension = Dimension::from_exponents(0, 0, 0, 0, 0);
    pub const LENGTH: Dimension = Dimension::from_exponents(1, 0, 0, 0, 0);
    pub const MASS: Dimension = Dimension::from_exponents(0, 1, 0, 0, 0);
    pub const TIME: Dimension = Dimension::from_exponents(0, 0, 1, 0, 0);
    pub const CURRENT: Dimension = Dimension::from_exponents(0, 0, 0, 1, 0);
    pub const TEMPERATURE: Dimension = Dimension::from_exponents(0, 0, 0, 0, 1);
    pub const AREA: Dimension = Dimension::from_exponents(2, 0, 0, 0, 0);
    pub const VOLUME: Dimension = Dimension::from_exponents(3, 0, 0, 0, 0);
    pub const NUMBER_DENSITY: Dimension = Dimension::from_exponents(-3, 0, 0, 0, 0);
    pub const VELOCITY: Dimension = Dimension::from_exponents(1, 0, -1, 0, 0);
    pub const FREQUENCY: Dimension = Dimension::from_exponents(0, 0, -1, 0, 0);
    pub const ENERGY: Dimension = Dimension::from_exponents(2, 1, -2, 0, 0);
    pub const ACTION: Dimension = Dimension::from_exponents(2, 1, -1, 0, 0);
    /// Tesla, kg·s⁻²·A⁻¹.
    pub const MAGNETIC_FIELD: Dimension = Dimension::from_exponents(0, 1, -2, -1, 0);
    /// N/A², kg·m·s⁻²·A⁻².
    pub const PERMEABILITY: Dimension = Dimension::from_exponents(1, 1, -2, -2, 0);
    /// J/T = A·m².
    pub const MAGNETIC_MOMENT: Dimension = Dimension::from_exponents(2, 0, 0, 1, 0);
    /// T/√Hz = T·s^½.
    pub const FIELD_DENSITY: Dimension = Dimension {
        half_exponents: [0, 2, -3, -2, 0],
    };

    pub const fn mul(self, rhs: Dimension) -> Dimension {
        let mut out = [0i8; 5];
        let mut i = 0;
        while i < 5 {
            out[i] = self.half_exponents[i] + rhs.half_exponents[i];
            i += 1;
        }
        Dimension {
            half_exponents: out,
        }
    }

    pub const fn div(self, rhs: Dimension) -> Dimension {
        let mut out = [0i8; 5];
        let mut i = 0;
        while i < 5 {
            out[i] = self.half_exponents[i] - rhs.half_exponents[i];
            i += 1;
        }
        Dimension {
            half_exponents: out,
        }
    }

    pub fn powi(self, n: i8) -> Dimension {
        Dimension {
            half_exponents: self.half_exponents.map(|e| e * n),
        }
    }

    pub fn sqrt(self) -> Option<Dimension> {
        if self.half_exponents.iter().any(|e| e % 2 != 0) {
            return None;
        }
        Some(Dimension {
            half_exponents: self.half_exponents.map(|e| e / 2),
        })
    }

    pub fn is_dimensionless(self) -> bool {
        self == Self::DIMENSIONLESS
    }

    fn name(self) -> Option<&'static str> {
        let named = [
            (Self::DIMENSIONLESS, "dimensionless"),
            (Self::LENGTH, "length"),
            (Self::MASS, "mass"),
            (Self::TIME, "time"),
            (Self::TEMPERATURE, "temperature"),
            (Self::AREA, "area"),
            (Self::VOLUME, "volume"),
            (Self::NUMBER_DENSITY, "number density"),
            (Self::VELOCITY, "velocity"),
            (Self::FREQUENCY, "frequency"),
            (Self::ENERGY, "energy"),
            (Self::ACTION, "action"),
            (Self::MAGNETIC_FIELD, "magnetic field"),
            (Self::PERMEABILITY, "permeability"),
            (Self::MAGNETIC_MOMENT, "magnetic moment"),
            (Self::FIELD_DENSITY, "field spectral density"),
        ];
        named.iter().find(|(d, _)| *d == self).map(|(_, n)| *n)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (sym, &h) in BASE_SYMBOLS.iter().zip(self.half_exponents.iter()) {
            match h {
                0 => {}
                2 => parts.push((*sym).to_string()),
                h if h % 2 == 0 => parts.push(format!("{sym}^{}", h / 2)),
                h => parts.push(format!("{sym}^({h}/2)")),
            }
        }
        let base = if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("·")
        };
        match self.name() {
            Some(name) => write!(f, "{name} [{base}]"),
            None => write!(f, "[{base}]"),
        }
    }
}

/// An SI value tagged with its dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    value: f64,
    dim: Dimension,
}

impl Quantity {
    pub const fn new(value: f64, dim: Dimension) -> Self {
        Self { value, dim }
    }

    pub const fn dimensionless(value: f64) -> Self {
        Self::new(value, Dimension::DIMENSIONLESS)
    }

    /// Build from a value expressed in `unit`.
    pub fn from_unit(value: f64, unit: &Unit) -> Self {
        Self::new(unit.to_si(value), unit.dim)
    }

    /// SI value, without checking the dimension.
    pub fn si(&self) -> f64 {
        self.value
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// SI value, provided the dimension is `dim`.
    pub fn expect(&self, dim: Dimension) -> Result<f64, UnitError> {
        if self.dim == dim {
            Ok(self.value)
        } else {
            Err(UnitError::DimensionMismatch {
                expected: dim,
                found: self.dim,
            })
        }
    }

    pub fn in_unit(&self, unit: &Unit) -> Result<f64, UnitError> {
        let si = self.expect(unit.dim)?;
        Ok(unit.from_si(si))
    }

    pub fn try_add(self, rhs: Quantity) -> Result<Quantity, UnitError> {
        let v = rhs.expect(self.dim)?;
        Ok(Quantity::new(self.value + v, self.dim))
    }

    pub fn try_sub(self, rhs: Quantity) -> Result<Quantity, UnitError> {
        let v = rhs.expect(self.dim)?;
        Ok(Quantity::new(self.value - v, self.dim))
    }

    pub fn powi(self, n: i8) -> Quantity {
        Quantity::new(self.value.powi(n as i32), self.dim.powi(n))
    }

    pub fn sqrt(self) -> Result<Quantity, UnitError> {
        let dim = self.dim.sqrt().ok_or(UnitError::OddRoot(self.dim))?;
        Ok(Quantity::new(self.value.sqrt(), dim))
    }
}

impl Mul for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: Quantity) -> Quantity {
        Quantity::new(self.value * rhs.value, self.dim.mul(rhs.dim))
    }
}

impl Div for Quantity {
    type Output = Quantity;
    fn div(self, rhs: Quantity) -> Quantity {
        Quantity::new(self.value / rhs.value, self.dim.div(rhs.dim))
    }
}

impl Mul<f64> for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: f64) -> Quantity {
        Quantity::new(self.value * rhs, self.dim)
    }
}

impl Div<f64> for Quantity {
    type Output = Quantity;
    fn div(self, rhs: f64) -> Quantity {
        Quantity::new(self.value / rhs, self.dim)
    }
}

/// A unit: `mantissa × 10^pow10` SI units of `dim`.
///
/// Metric prefixes only move `pow10`, so conversions between them are a
/// single multiplication or division by an exactly representable power of ten.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    symbol: String,
    mantissa: f64,
    pow10: i32,
    dim: Dimension,
}

fn pow10_scale(v: f64, pow10: i32) -> f64 {
    // 10^k is exact in f64 for 0 <= k <= 22
    if pow10 >= 0 {
        v * 10f64.powi(pow10)
    } else {
        v / 10f64.powi(-pow10)
    }
}

impl Unit {
    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn to_si(&self, v: f64) -> f64 {
        pow10_scale(v * self.mantissa, self.pow10)
    }

    pub fn from_si(&self, v: f64) -> f64 {
        pow10_scale(v, -self.pow10) / self.mantissa
    }

    /// Parse a unit symbol.
    ///
    /// Grammar: `[/]prefix?base[2|3][/rtHz]`, e.g. `cm3`, `/cm3`, `us`,
    /// `pG/rtHz`, `K`. Prefixes: f p n u µ m c k.
    pub fn parse(symbol: &str) -> Result<Unit, UnitError> {
        let unknown = || UnitError::UnknownUnit(symbol.to_string());
        let s = symbol.trim();
        if s.is_empty() {
            return Err(unknown());
        }
        if let Some(rest) = s.strip_prefix('/') {
            let inner = Unit::parse(rest)?;
            return Ok(Unit {
                symbol: s.to_string(),
                mantissa: 1.0 / inner.mantissa,
                pow10: -inner.pow10,
                dim: Dimension::DIMENSIONLESS.div(inner.dim),
            });
        }
        for suffix in ["/rtHz", "/√Hz", "/sqrtHz"] {
            if let Some(rest) = s.strip_suffix(suffix) {
                let inner = Unit::parse(rest)?;
                let half_second = Dimension {
                    half_exponents: [0, 0, 1, 0, 0],
                };
                return Ok(Unit {
                    symbol: s.to_string(),
                    dim: inner.dim.mul(half_second),
                    ..inner
                });
            }
        }
        let (body, power) = match s.as_bytes()[s.len() - 1] {
            b'2' => (&s[..s.len() - 1], 2),
            b'3' => (&s[..s.len() - 1], 3),
            _ => (s, 1),
        };
        let (mantissa, pow10, dim) = prefixed_base(body).ok_or_else(unknown)?;
        if power != 1 && dim != Dimension::LENGTH {
            return Err(unknown());
        }
        Ok(Unit {
            symbol: s.to_string(),
            mantissa: mantissa.powi(power),
            pow10: pow10 * power,
            dim: dim.powi(power as i8),
        })
    }
}

fn base_unit(sym: &str) -> Option<(f64, i32, Dimension)> {
    Some(match sym {
        "" => (1.0, 0, Dimension::DIMENSIONLESS),
        "m" => (1.0, 0, Dimension::LENGTH),
        "g" => (1.0, -3, Dimension::MASS),
        "amu" | "u" => (1.660_539_066_60, -27, Dimension::MASS),
        "s" => (1.0, 0, Dimension::TIME),
        "Hz" => (1.0, 0, Dimension::FREQUENCY),
        "K" => (1.0, 0, Dimension::TEMPERATURE),
        "J" => (1.0, 0, Dimension::ENERGY),
        "T" => (1.0, 0, Dimension::MAGNETIC_FIELD),
        "G" => (1.0, -4, Dimension::MAGNETIC_FIELD),
        _ => return None,
    })
}

fn prefixed_base(body: &str) -> Option<(f64, i32, Dimension)> {
    if body == "u" {
        return base_unit("amu");
    }
    if let Some(b) = base_unit(body).filter(|_| !body.is_empty()) {
        return Some(b);
    }
    let mut chars = body.chars();
    let prefix = chars.next()?;
    let rest = chars.as_str();
    if rest.is_empty() || rest == "amu" || rest == "u" {
        return None;
    }
    let p = match prefix {
        'f' => -15,
        'p' => -12,
        'n' => -9,
        'u' | 'µ' | 'μ' => -6,
        'm' => -3,
        'c' => -2,
        'k' => 3,
        _ => return None,
    };
    let (mantissa, pow10, dim) = base_unit(rest)?;
    Some((mantissa, pow10 + p, dim))
}

/// Parse `"<number><unit>"`, e.g. `1e14/cm3`, `10cm3`, `300pT/rtHz`.
///
/// A unit suffix is mandatory; use [`parse_dimensionless`] for pure numbers.
pub fn parse_quantity(text: &str) -> Result<Quantity, UnitError> {
    let t = text.trim();
    let split = number_prefix_len(t);
    if split == 0 {
        return Err(UnitError::Malformed(text.to_string()));
    }
    let (num, unit) = t.split_at(split);
    let value: f64 = num
        .parse()
        .map_err(|_| UnitError::Malformed(text.to_string()))?;
    let unit = unit.trim();
    if unit.is_empty() {
        return Err(UnitError::MissingUnit(text.to_string()));
    }
    let unit = Unit::parse(unit)?;
    Ok(Quantity::from_unit(value, &unit))
}

/// Parse a value that must carry `dim`.
pub fn parse_expecting(text: &str, dim: Dimension) -> Result<f64, UnitError> {
    parse_quantity(text)?.expect(dim)
}

pub fn parse_dimensionless(text: &str) -> Result<f64, UnitError> {
    text.trim()
        .parse()
        .map_err(|_| UnitError::Malformed(text.to_string()))
}

/// Length of the longest prefix of `t` that parses as a float.
fn number_prefix_len(t: &str) -> usize {
    let bytes = t.as_bytes();
    let mut i = 0;
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > start
    };
    if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
        i += 1;
    }
    let mut any = digits(&mut i);
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        any |= digits(&mut i);
    }
    if !any {
        return 0;
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if digits(&mut j) {
            i = j;
        }
    }
    i
}

/// Convert `value` from one unit to another of the same dimension.
pub fn convert(value: f64, from: &Unit, to: &Unit) -> Result<f64, UnitError> {
    Quantity::from_unit(value, from).in_unit(to)
}
