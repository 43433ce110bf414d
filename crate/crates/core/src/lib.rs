//! Energy resolution limit (ERL) calculators for magnetometers.
//!
//! The crate chains a thermodynamic work bound, the Margolus–Levitin speed
//! limit and a spin-temperature model into sensitivity floors and ERL values
//! for atomic vapor cells, SQUIDs and diamond sensors, and ships a Monte Carlo
//! simulator for the spin-noise relaxation transient together with its
//! closed-form variance.
//!
//! All computations are in SI. Unit-bearing text only enters and leaves through
//! [`units`].

pub mod erl;
mod error;
pub mod sensors;
pub mod sim;
pub mod species;
pub mod units;

pub use error::{Error, Result};
pub use units::{constants, PhysicalConstants};
