pub mod cache;
pub mod coeff_rings;
pub mod config_complex;
pub mod error;
pub mod exact_linalg;
pub mod group_ring;
pub mod report;
pub mod rp_presentation;
pub mod torsion_invariants;

pub use error::{Error, Result};
