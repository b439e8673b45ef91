//! Terminating Gauss hypergeometric series 2F1(-m, b; c; z).
//!
//! Terms are generated and accumulated in double-double arithmetic, so the
//! result keeps close to full double precision as long as the cancellation
//! ratio (largest term over result) stays below about 1e16. Beyond
//! [`SIGNIFICANCE_THRESHOLD`] the report carries a loss flag and callers are
//! expected to use an independent route.

use num_complex::Complex64;

use super::ddouble::{ComplexDd, DoubleDouble};
use super::PolyEvalReport;
use crate::error::{Error, Result};

/// Result magnitudes below this fraction of the largest partial term are
/// flagged as having lost significance.
pub const SIGNIFICANCE_THRESHOLD: f64 = 1e-10;

const RESCALE_ABOVE: f64 = 1e250;
const POW2_DOWN: f64 = 1.0 / (1u128 << 100) as f64 / (1u128 << 100) as f64;
const LN_POW2_DOWN: f64 = -200.0 * std::f64::consts::LN_2;

/// Argument of a reflected evaluation: `z` and an independently accurate
/// `1 - z`.
#[derive(Debug, Clone, Copy)]
pub struct HyperArg {
    pub z: Complex64,
    pub one_minus_z: Complex64,
}

impl HyperArg {
    pub fn new(z: Complex64) -> Self {
        Self {
            z,
            one_minus_z: Complex64::new(1.0, 0.0) - z,
        }
    }
}

/// Which algebraic form produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SeriesForm {
    Direct,
    /// 2F1(-m,b;c;z) = (c-b)_m/(c)_m · 2F1(-m, b; b-c-m+1; 1-z)
    Reflected,
}

/// Σ_{j=0}^{m} (-m)_j (b)_j / ((c)_j j!) z^j with compensated summation.
pub fn terminating_2f1(m: u32, b: f64, c: f64, z: Complex64) -> Result<PolyEvalReport<Complex64>> {
    check_denominator(m, c, "c")?;
    Ok(sum_series(m, b.into(), c.into(), ComplexDd::from_c64(z), SIGNIFICANCE_THRESHOLD))
}

/// The reflected form of [`terminating_2f1`], evaluated from `1 - z`.
pub fn terminating_2f1_reflected(
    m: u32,
    b: f64,
    c: f64,
    one_minus_z: Complex64,
) -> Result<PolyEvalReport<Complex64>> {
    reflected(
        m,
        b.into(),
        c.into(),
        ComplexDd::from_c64(one_minus_z),
        SIGNIFICANCE_THRESHOLD,
    )
}

/// Evaluate both algebraic forms where they are defined and keep the one
/// with the smaller cancellation ratio.
pub fn terminating_2f1_best(
    m: u32,
    b: f64,
    c: f64,
    arg: HyperArg,
) -> Result<(PolyEvalReport<Complex64>, SeriesForm)> {
    best(
        m,
        b.into(),
        c.into(),
        HyperArgDd {
            z: ComplexDd::from_c64(arg.z),
            one_minus_z: ComplexDd::from_c64(arg.one_minus_z),
        },
        SIGNIFICANCE_THRESHOLD,
    )
}

/// Series inputs carried in double-double.
///
/// When `b`, `c` and `z` are known to ~32 digits the result is good to
/// roughly `condition × 1e-32`, so the loss flag uses
/// [`DD_SIGNIFICANCE_THRESHOLD`] instead.
pub const DD_SIGNIFICANCE_THRESHOLD: f64 = 1e-22;

#[derive(Debug, Clone, Copy)]
pub struct HyperArgDd {
    pub z: ComplexDd,
    pub one_minus_z: ComplexDd,
}

pub fn terminating_2f1_dd(
    m: u32,
    b: DoubleDouble,
    c: DoubleDouble,
    z: ComplexDd,
) -> Result<PolyEvalReport<Complex64>> {
    check_denominator(m, c.to_f64(), "c")?;
    Ok(sum_series(m, b, c, z, DD_SIGNIFICANCE_THRESHOLD))
}

pub fn terminating_2f1_reflected_dd(
    m: u32,
    b: DoubleDouble,
    c: DoubleDouble,
    one_minus_z: ComplexDd,
) -> Result<PolyEvalReport<Complex64>> {
    reflected(m, b, c, one_minus_z, DD_SIGNIFICANCE_THRESHOLD)
}

pub fn terminating_2f1_best_dd(
    m: u32,
    b: DoubleDouble,
    c: DoubleDouble,
    arg: HyperArgDd,
) -> Result<(PolyEvalReport<Complex64>, SeriesForm)> {
    best(m, b, c, arg, DD_SIGNIFICANCE_THRESHOLD)
}

fn best(
    m: u32,
    b: DoubleDouble,
    c: DoubleDouble,
    arg: HyperArgDd,
    threshold: f64,
) -> Result<(PolyEvalReport<Complex64>, SeriesForm)> {
    check_denominator(m, c.to_f64(), "c")?;
    let direct = sum_series(m, b, c, arg.z, threshold);
    if !direct.significance_loss && direct.condition < 1e3 {
        return Ok((direct, SeriesForm::Direct));
    }
    match reflected(m, b, c, arg.one_minus_z, threshold) {
        Ok(refl) if refl.condition < direct.condition => Ok((refl, SeriesForm::Reflected)),
        _ => Ok((direct, SeriesForm::Direct)),
    }
}

fn reflected(
    m: u32,
    b: DoubleDouble,
    c: DoubleDouble,
    one_minus_z: ComplexDd,
    threshold: f64,
) -> Result<PolyEvalReport<Complex64>> {
    check_denominator(m, c.to_f64(), "c")?;
    let c_reflected = b - c - DoubleDouble::new(m as f64 - 1.0);
    check_denominator(m, c_reflected.to_f64(), "b - c - m + 1")?;

    // (c-b)_m / (c)_m as sign and log-magnitude
    let c_minus_b = c - b;
    let mut log_mag = 0.0;
    let mut sign = 1.0;
    for k in 0..m {
        let kk = DoubleDouble::new(k as f64);
        let num = c_minus_b + kk;
        if num.hi == 0.0 {
            return Err(Error::domain("reflection prefactor vanishes"));
        }
        let ratio = (num / (c + kk)).to_f64();
        if ratio < 0.0 {
            sign = -sign;
        }
        log_mag += ratio.abs().ln();
    }
    let inner = sum_series(m, b, c_reflected, one_minus_z, threshold);
    Ok(PolyEvalReport {
        value: inner.value * sign,
        magnitude_scale: inner.magnitude_scale + log_mag,
        terms_summed: inner.terms_summed,
        condition: inner.condition,
        significance_loss: inner.significance_loss,
    })
}

fn check_denominator(m: u32, c: f64, name: &str) -> Result<()> {
    if !c.is_finite() {
        return Err(Error::domain(format!("{name} must be finite")));
    }
    if c <= 0.0 && c.fract() == 0.0 && (-c) < m as f64 {
        return Err(Error::domain(format!(
            "{name} = {c} is a pole of the series within {m} terms"
        )));
    }
    Ok(())
}

fn sum_series(
    m: u32,
    b: DoubleDouble,
    c: DoubleDouble,
    z: ComplexDd,
    threshold: f64,
) -> PolyEvalReport<Complex64> {
    let mut term = ComplexDd::ONE;
    let mut sum = ComplexDd::ONE;
    let mut scale = 0.0;
    // log of the largest |term|, tracked in the same scaled frame
    let mut log_max = 0.0f64;

    for j in 0..m {
        let jf = j as f64;
        let jd = DoubleDouble::new(jf);
        let num = DoubleDouble::new(jf - m as f64) * (b + jd);
        let den = (c + jd) * DoubleDouble::new(jf + 1.0);
        term = term.scale_real(num / den) * z;
        sum = sum + term;
        let mag = term.norm();
        if mag > 0.0 {
            log_max = log_max.max(mag.ln() + scale);
        }
        if mag > RESCALE_ABOVE {
            term = term.scale_pow2(POW2_DOWN);
            sum = sum.scale_pow2(POW2_DOWN);
            scale -= LN_POW2_DOWN;
        }
        if mag == 0.0 {
            break;
        }
    }

    let value = sum.to_c64();
    let log_value = value.norm().ln() + scale;
    let condition = (log_max - log_value).exp().max(1.0);
    PolyEvalReport {
        value,
        magnitude_scale: scale,
        terms_summed: m as usize + 1,
        condition,
        significance_loss: condition > 1.0 / threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_cases_equal_one() {
        let r = terminating_2f1(0, 3.3, 1.7, c(0.9, -2.0)).unwrap();
        assert_eq!(r.reconstructed(), c(1.0, 0.0));
        let r = terminating_2f1(17, 3.3, 1.7, c(0.0, 0.0)).unwrap();
        assert_eq!(r.reconstructed(), c(1.0, 0.0));
        assert_eq!(r.terms_summed, 18);
    }

    #[test]
    fn four_term_oracle() {
        // exact rational expansion: 0.4298125 - 0.097921875 i
        let r = terminating_2f1(3, 2.5, 4.0, c(0.4, 0.1)).unwrap();
        let v = r.reconstructed();
        assert!((v.re - 0.4298125).abs() < 1e-15);
        assert!((v.im + 0.097921875).abs() < 1e-15);
        assert!(!r.significance_loss);
    }

    #[test]
    fn reflection_agrees_where_both_are_benign() {
        let (m, b, cc) = (9, 4.25, 2.5);
        let z = c(0.55, 0.2);
        let d = terminating_2f1(m, b, cc, z).unwrap().reconstructed();
        let r = terminating_2f1_reflected(m, b, cc, c(1.0, 0.0) - z)
            .unwrap()
            .reconstructed();
        assert!((d - r).norm() < 1e-12 * d.norm(), "{d} vs {r}");
    }

    #[test]
    fn pole_in_denominator_is_a_domain_error() {
        assert!(matches!(terminating_2f1(5, 1.0, -2.0, c(0.3, 0.0)), Err(Error::Domain(_))));
        // the pole is not reached when m is small enough
        assert!(terminating_2f1(2, 1.0, -2.0, c(0.3, 0.0)).is_ok());
    }

    #[test]
    fn flags_catastrophic_cancellation() {
        // the n ~ 95 Rydberg regime: direct sum cancels over ~38 decades
        let z = c(2.0 / (95.0 * 0.0117465 + 1.0), 0.0);
        let r = terminating_2f1(93, 172.225, 4.0, z).unwrap();
        assert!(r.significance_loss);
        assert!(r.condition > 1e30);
    }

    #[test]
    fn best_form_picks_reflection_near_unit_argument() {
        let nb = 85.0 * 0.011746494841398246;
        let arg = HyperArg {
            z: c(2.0 / (nb + 1.0), 0.0),
            one_minus_z: c((nb - 1.0) / (nb + 1.0), 0.0),
        };
        let (r, form) = terminating_2f1_best(83, 172.225103150344, 4.0, arg).unwrap();
        assert_eq!(form, SeriesForm::Reflected);
        assert!(!r.significance_loss);
    }

    #[test]
    fn dd_inputs_hold_accuracy_at_the_window_edge() {
        let alpha = 168.2251031503445;
        let g0 = 0.011746494841398246;
        let b = DoubleDouble::new(alpha) + DoubleDouble::new(4.0);
        let cc = DoubleDouble::new(4.0);
        for (n, want) in [
            (85u32, -2.940745184104380854622064e44),
            (95, -1.5713649798609632111819e38),
            (100, 7.134269388642497084171913e31),
        ] {
            let nb = DoubleDouble::new(n as f64) * DoubleDouble::new(g0);
            let one = DoubleDouble::ONE;
            let den = nb + one;
            let arg = HyperArgDd {
                z: ComplexDd::new(DoubleDouble::new(2.0) / den, DoubleDouble::ZERO),
                one_minus_z: ComplexDd::new((nb - one) / den, DoubleDouble::ZERO),
            };
            let (r, _) = terminating_2f1_best_dd(n - 2, b, cc, arg).unwrap();
            let got = r.reconstructed().re;
            assert!(!r.significance_loss, "n = {n}");
            assert!(((got - want) / want).abs() < 1e-12, "n = {n}: {got} vs {want}");
        }
    }
}
