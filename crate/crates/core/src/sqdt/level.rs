use serde::Serialize;

use super::atom::{AtomModel, ChannelSpec};
use crate::error::{Error, Result};
use crate::specfun::{laguerre_recurrence, log_gamma_unchecked};

/// n* = n - δ(l) and l* = l - δ(l) + I(l) for the given atom.
pub fn effective_numbers(atom: &AtomModel, n: u32, l: u32) -> Result<(f64, f64)> {
    let st = RadialEigenstate::new(atom, n, l)?;
    Ok((st.n_star, st.l_star))
}

/// E = -1 / (2 n*²) in hartree.
pub fn energy(n_star: f64) -> Result<f64> {
    if !(n_star > 0.0) {
        return Err(Error::domain(format!("energy requires n* > 0, got {n_star}")));
    }
    Ok(-0.5 / (n_star * n_star))
}

/// A bound SQDT level with its analytic radial eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialEigenstate {
    pub n: u32,
    pub l: u32,
    pub n_star: f64,
    pub l_star: f64,
    /// Laguerre degree n* - l* - 1 = n - l - 1 - I(l), kept as an integer.
    pub degree: u32,
    pub energy: f64,
    ln_norm: f64,
}

impl RadialEigenstate {
    pub fn new(atom: &AtomModel, n: u32, l: u32) -> Result<Self> {
        let ch = atom.channel(l)?;
        Self::from_channel(n, ch)
    }

    pub fn from_channel(n: u32, ch: ChannelSpec) -> Result<Self> {
        let l = ch.l;
        if n < l + 1 {
            return Err(Error::InvalidLevel {
                n,
                l,
                reason: "n must be at least l + 1".into(),
            });
        }
        let degree = n as i64 - l as i64 - 1 - ch.susy_int as i64;
        let n_star = n as f64 - ch.delta;
        let l_star = ch.l_star();
        if degree < 0 || n_star <= l_star {
            return Err(Error::InvalidLevel {
                n,
                l,
                reason: format!(
                    "n* = {n_star} must exceed l* = {l_star} (Laguerre degree {degree})"
                ),
            });
        }
        if !(l_star > -1.0) {
            return Err(Error::domain(format!("l* = {l_star} <= -1")));
        }
        let degree = degree as u32;
        let k = degree as f64;
        // ln[(2/n*²) sqrt(Γ(n*-l*) / Γ(n*+l*+1))], Γ arguments written via the degree
        let ln_norm = (2.0 / (n_star * n_star)).ln()
            + 0.5 * (log_gamma_unchecked(k + 1.0) - log_gamma_unchecked(k + 2.0 * l_star + 2.0));
        Ok(Self {
            n,
            l,
            n_star,
            l_star,
            degree,
            energy: -0.5 / (n_star * n_star),
            ln_norm,
        })
    }

    /// A state with explicit (n, δ, I), e.g. a configurable ground state.
    pub fn with_defect(n: u32, l: u32, delta: f64, susy_int: u32) -> Result<Self> {
        Self::from_channel(n, ChannelSpec::new(l, delta, susy_int)?)
    }

    pub fn hydrogen(n: u32, l: u32) -> Result<Self> {
        Self::from_channel(n, ChannelSpec::hydrogenic(l))
    }

    /// Laguerre order 2l* + 1.
    pub fn laguerre_order(&self) -> f64 {
        2.0 * self.l_star + 1.0
    }

    /// R_{n*l*}(r), returning an error for negative r.
    pub fn radial_eigenfunction(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain(format!("radius must be >= 0, got {r}")));
        }
        Ok(self.eval(r))
    }

    /// R_{n*l*}(r) for r >= 0 without argument checks.
    ///
    /// The prefactor, the power (2r/n*)^{l*}, the exponential and the
    /// Laguerre scale are combined in log space so nothing overflows at
    /// n ~ 100.
    pub fn eval(&self, r: f64) -> f64 {
        let x = 2.0 * r / self.n_star;
        if x == 0.0 {
            return if self.l_star > 0.0 {
                0.0
            } else if self.l_star == 0.0 {
                (self.ln_norm + laguerre_at_zero(self.degree, self.laguerre_order()).ln()).exp()
            } else {
                f64::INFINITY
            };
        }
        let lag = laguerre_recurrence(self.degree, self.laguerre_order(), x);
        if lag.value == 0.0 {
            return 0.0;
        }
        let ln_mag = self.ln_norm + self.l_star * x.ln() - 0.5 * x + lag.magnitude_scale;
        lag.value * ln_mag.exp()
    }

    /// Radius beyond which the eigenfunction is negligible (tail far below
    /// 1e-14 of its peak).
    pub fn extent(&self) -> f64 {
        (4.0 * self.n_star * self.n_star + 30.0 * self.n_star).max(50.0)
    }
}

fn laguerre_at_zero(k: u32, a: f64) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * (a + j as f64) / j as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rb() -> AtomModel {
        AtomModel::builtin("rubidium").unwrap()
    }

    #[test]
    fn effective_numbers_for_reference_atoms() {
        let h = AtomModel::hydrogen();
        assert_eq!(effective_numbers(&h, 85, 1).unwrap(), (85.0, 1.0));
        let (ns, ls) = effective_numbers(&rb(), 85, 1).unwrap();
        assert!((ns - 82.35).abs() < 1e-12 && (ls - 1.35).abs() < 1e-12);
        let k = AtomModel::builtin("potassium").unwrap();
        let (ns, ls) = effective_numbers(&k, 67, 1).unwrap();
        assert!((ns - 65.29).abs() < 1e-12 && (ls - 1.29).abs() < 1e-12);
    }

    #[test]
    fn missing_channel_and_invalid_levels() {
        assert!(matches!(effective_numbers(&rb(), 85, 0), Err(Error::Config(_))));
        // rubidium p needs n >= l + 1 + I = 5
        assert!(matches!(
            RadialEigenstate::new(&rb(), 4, 1),
            Err(Error::InvalidLevel { .. })
        ));
        assert!(RadialEigenstate::new(&rb(), 5, 1).is_ok());
        assert!(matches!(
            RadialEigenstate::hydrogen(1, 1),
            Err(Error::InvalidLevel { .. })
        ));
    }

    #[test]
    fn energies() {
        assert_eq!(energy(1.0).unwrap(), -0.5);
        assert!((energy(85.0).unwrap() + 6.9204e-5).abs() < 5e-9);
        assert!((energy(82.35).unwrap() + 7.3728e-5).abs() < 5e-9);
        assert!(energy(0.0).is_err());
        assert!(energy(-2.0).is_err());
    }

    #[test]
    fn closed_form_hydrogen_values() {
        let s10 = RadialEigenstate::hydrogen(1, 0).unwrap();
        assert!((s10.eval(0.0) - 2.0).abs() < 1e-14);
        let s21 = RadialEigenstate::hydrogen(2, 1).unwrap();
        let want = 2.0 * (-1.0f64).exp() / 24f64.sqrt();
        assert!((s21.eval(2.0) - want).abs() < 1e-15);
        assert!((want - 0.150186).abs() < 1e-6);
        assert_eq!(s21.eval(0.0), 0.0);
    }

    #[test]
    fn rubidium_against_extended_precision() {
        // 50-digit evaluation of the same closed form
        let st = RadialEigenstate::new(&rb(), 85, 1).unwrap();
        let cases = [
            (13560.0, 0.000001055009543886073836247145),
            (5000.0, -0.000000482992730880449436792377),
        ];
        for (r, want) in cases {
            let got = st.eval(r);
            assert!(((got - want) / want).abs() < 1e-10, "r={r}: {got} vs {want}");
        }
        let h85 = RadialEigenstate::hydrogen(85, 1).unwrap();
        let want = -0.00001654231823721847773874605;
        assert!(((h85.eval(100.0) - want) / want).abs() < 1e-10);
    }

    #[test]
    fn degree_is_integral() {
        for n in 5..120 {
            let st = RadialEigenstate::new(&rb(), n, 1).unwrap();
            let d = st.n_star - st.l_star - 1.0;
            assert!((d - st.degree as f64).abs() < 1e-12);
        }
    }
}
