//! Eigenbasis dynamics of radial squeezed states.
//!
//! An RSS is expanded as Σ c_n R_{n*l*}(r) in one l channel, evolved with
//! the exact SQDT spectrum, and summarized by the autocorrelation
//! A(t) = |Σ |c_n|² e^{-iE_n t}|². The Crank–Nicolson propagator evolves the
//! same initial state on a grid as an independent check.

mod crank_nicolson;
mod decompose;
mod dynamics;
mod revival;

pub use crank_nicolson::{
    cn_propagate, cn_propagate_with, CnPropagator, Propagation, Stencil, BOUNDARY_TOLERANCE,
};
pub use decompose::{
    closed_form_coefficient, coefficient, decompose, decompose_with, default_window,
    quadrature_coefficient, quadrature_coefficient_with, Coefficient, CoefficientSource,
    DecomposeOptions, SpectralDecomposition, DEFAULT_HALF_WIDTH, EDGE_FRACTION,
};
pub use dynamics::{autocorrelation, evolve, uniform_times, AutocorrelationTrace, EigenBasis};
pub use revival::{
    delta_n, detect_peaks, empirical_collapse_time, leading_chain, revival_schedule, spacings,
    DeltaN, FractionalRevival, FractionalTime, Peak, RevivalSchedule,
};
