//! Atom models, SQDT levels and radial eigenfunctions.
//!
//! A channel with quantum defect δ and supersymmetry integer I has
//! n* = n - δ, l* = l - δ + I, E = -1/(2n*²) and
//!
//! ```text
//! R(r) = (2/n*²) sqrt(Γ(n*-l*) / Γ(n*+l*+1)) (2r/n*)^l* e^(-r/n*) L_{n*-l*-1}^(2l*+1)(2r/n*)
//! ```

mod atom;
mod grid;
mod level;
mod overlap;

pub use atom::{AtomModel, AtomTable, ChannelSpec, BUILTIN_ATOMS};
pub use grid::{sample, RadialGrid, SampledWavefunction};
pub use level::{effective_numbers, energy, RadialEigenstate};
pub use overlap::{radial_overlap, radial_overlap_with};
