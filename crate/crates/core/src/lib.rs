//! Radial Rydberg wave packets in hydrogen and alkali atoms.
//!
//! Everything is in Hartree atomic units. Conversions to picoseconds and
//! nanoseconds live in [`units`] and are only applied at the edges.

pub mod classical;
pub mod error;
pub mod evolution;
pub mod perturbation;
pub mod quadrature;
pub mod rss;
pub mod specfun;
pub mod sqdt;
pub mod units;

pub use error::{Error, Result};
