//! Technology-specific ERL predictors.
//!
//! - [`atomic`]: spin-destruction limited alkali vapor cells.
//! - [`squid`]: flux-locked SQUIDs, information 𝓘 ≈ −p ln p.
//! - [`diamond`]: NV ensembles, information 𝓘 = ln 2.

pub mod atomic;
pub mod diamond;
pub mod squid;

pub use atomic::{
    atomic_floor, atomic_psd, calibrate_species, delta_b_scaling, invert_sigma_v, AtomicErlReport,
    ReferenceRow, VaporCell, REFERENCE_DENSITY, REFERENCE_ROWS, REFERENCE_VOLUME,
};
pub use diamond::{diamond_erl, measured_erl_from_psd, DiamondReport, DiamondSpec};
pub use squid::{
    bundled_records, compare_published, parse_published_records, squid_erl, ComparisonRow,
    PublishedRecord, SquidSpec,
};
