//! Special-function kernels shared by the physics modules.
//!
//! All functions are pure; nothing here holds state.

pub mod ddouble;
mod erfi;
mod gamma;
mod hyper;
mod laguerre;

pub use erfi::{dawson, erfi, turn_on_factor, ERFI_OVERFLOW_GUARD, TAYLOR_LIMIT};
pub use gamma::log_gamma;
pub(crate) use gamma::log_gamma_unchecked;
pub use hyper::{
    terminating_2f1, terminating_2f1_best, terminating_2f1_best_dd, terminating_2f1_dd,
    terminating_2f1_reflected, terminating_2f1_reflected_dd, HyperArg, HyperArgDd, SeriesForm,
    DD_SIGNIFICANCE_THRESHOLD, SIGNIFICANCE_THRESHOLD,
};
pub use laguerre::{generalized_laguerre, generalized_laguerre_scaled};
pub(crate) use laguerre::laguerre_recurrence;

use num_complex::Complex64;

/// A polynomial or series value carried with a separate log-magnitude.
///
/// The represented number is `value * exp(magnitude_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyEvalReport<T> {
    pub value: T,
    pub magnitude_scale: f64,
    pub terms_summed: usize,
    /// Largest partial term divided by the magnitude of the result (>= 1).
    pub condition: f64,
    pub significance_loss: bool,
}

impl PolyEvalReport<f64> {
    pub(crate) fn new(value: f64, magnitude_scale: f64, terms_summed: usize) -> Self {
        Self {
            value,
            magnitude_scale,
            terms_summed,
            condition: 1.0,
            significance_loss: false,
        }
    }

    pub fn reconstructed(&self) -> f64 {
        if self.magnitude_scale == 0.0 {
            self.value
        } else {
            self.value * self.magnitude_scale.exp()
        }
    }
}

impl PolyEvalReport<Complex64> {
    pub fn reconstructed(&self) -> Complex64 {
        if self.magnitude_scale == 0.0 {
            self.value
        } else {
            self.value * self.magnitude_scale.exp()
        }
    }
}
