use crate::error::{Error, Result};

use super::PolyEvalReport;

// Rescale the recurrence pair once it leaves this magnitude window.
const RESCALE_ABOVE: f64 = 1e200;
const RESCALE_FACTOR: f64 = 1e-200;

/// Generalized Laguerre polynomial L_k^{(a)}(x) for real order `a > -1`.
///
/// Evaluated with the ascending three-term recurrence in the degree,
///
///   (j+1) L_{j+1} = (2j + 1 + a - x) L_j - (j + a) L_{j-1},
///
/// which stays accurate in the oscillatory region where the explicit
/// alternating sum loses every digit.
pub fn generalized_laguerre(k: u32, a: f64, x: f64) -> Result<f64> {
    let rep = generalized_laguerre_scaled(k, a, x)?;
    let value = rep.reconstructed();
    if !value.is_finite() {
        return Err(Error::Range(format!(
            "L_{k}^({a})({x}) overflows double range; use the scaled form"
        )));
    }
    Ok(value)
}

/// Same as [`generalized_laguerre`] but keeps a separate log-magnitude so
/// large-degree values never overflow: the polynomial equals
/// `value * exp(magnitude_scale)`.
pub fn generalized_laguerre_scaled(k: u32, a: f64, x: f64) -> Result<PolyEvalReport<f64>> {
    check_args(a, x)?;
    Ok(laguerre_recurrence(k, a, x))
}

fn check_args(a: f64, x: f64) -> Result<()> {
    if !(a > -1.0) || !a.is_finite() {
        return Err(Error::domain(format!(
            "Laguerre order must satisfy a > -1, got {a}"
        )));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("Laguerre argument must be x >= 0, got {x}")));
    }
    Ok(())
}

pub(crate) fn laguerre_recurrence(k: u32, a: f64, x: f64) -> PolyEvalReport<f64> {
    let mut prev = 1.0;
    if k == 0 {
        return PolyEvalReport::new(prev, 0.0, 1);
    }
    let mut cur = 1.0 + a - x;
    let mut scale = 0.0;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + a - x) * cur - (jf + a) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_FACTOR;
            prev *= RESCALE_FACTOR;
            scale -= RESCALE_FACTOR.ln();
        }
    }
    PolyEvalReport::new(cur, scale, k as usize + 1)
}
