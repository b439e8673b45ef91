use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_OVER_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Switch from the Taylor series to the Dawson continued fraction.
pub const TAYLOR_LIMIT: f64 = 3.0;

/// erfi grows like exp(s²); above this argument it no longer fits in f64.
pub const ERFI_OVERFLOW_GUARD: f64 = 26.0;

/// Imaginary error function erfi(x) = -i erf(ix), odd in x.
pub fn erfi(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("erfi of NaN"));
    }
    let s = x.abs();
    if s > ERFI_OVERFLOW_GUARD {
        return Err(Error::Range(format!(
            "erfi({x}) exceeds the overflow guard |x| <= {ERFI_OVERFLOW_GUARD}"
        )));
    }
    let v = if s <= TAYLOR_LIMIT {
        erfi_taylor(s)
    } else {
        TWO_OVER_SQRT_PI * (s * s).exp() * dawson(s)
    };
    Ok(v.copysign(x))
}

fn erfi_taylor(s: f64) -> f64 {
    // 2/√π Σ s^{2k+1} / (k! (2k+1)); every term is positive
    let s2 = s * s;
    let mut pow = s;
    let mut sum = s;
    let mut k = 0.0;
    loop {
        k += 1.0;
        pow *= s2 / k;
        let term = pow / (2.0 * k + 1.0);
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    TWO_OVER_SQRT_PI * sum
}

/// Dawson's integral F(x) = exp(-x²) ∫₀ˣ exp(t²) dt for x >= 0, from the
/// continued fraction x / (1 + 2x²/(3 - 4x²/(5 + 6x²/(7 - ...)))) evaluated
/// with the modified Lentz algorithm.
pub fn dawson(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    for k in 1..20_000u32 {
        let a = if k == 1 {
            x
        } else {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * 2.0 * (k - 1) as f64 * x2
        };
        let b = (2 * k - 1) as f64;
        d = b + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = b + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// The formation factor ½[1 + erf(-i s)] = ½[1 - i·erfi(s)] that replaces
/// the free phase at the pulse centre.
pub fn turn_on_factor(s: f64) -> Result<Complex64> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!("turn_on_factor requires s >= 0, got {s}")));
    }
    let e = erfi(s)?;
    Ok(Complex64::new(0.5, -0.5 * e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn factor_at_zero() {
        assert_eq!(turn_on_factor(0.0).unwrap(), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn real_part_is_always_half() {
        for s in [0.1, 1.3, 2.99, 3.01, 7.5, 20.0] {
            assert_eq!(turn_on_factor(s).unwrap().re, 0.5);
        }
    }

    #[test]
    fn factor_at_one_matches_taylor_oracle() {
        // erfi(1)/2 from 60 terms of the Taylor series in 50-digit arithmetic
        let f = turn_on_factor(1.0).unwrap();
        assert!((f.im + 0.8252128793987714380).abs() < 1e-15);
    }

    #[test]
    fn both_sides_of_the_switch_point() {
        let table = [
            (0.5, 0.6149520946965109808396812),
            (2.9, 940.4698178989629427414216),
            (3.1, 2887.641097706367615063374),
            (5.0, 8298273880.676803516146223),
            (10.0, 1.524307422708669699360547e+42),
        ];
        for (x, want) in table {
            let got = erfi(x).unwrap();
            assert!(rel(got, want) < 1e-13, "erfi({x}) = {got}, want {want}");
        }
        // continuity across the switch
        let below = erfi(TAYLOR_LIMIT).unwrap();
        let above = TWO_OVER_SQRT_PI * 9f64.exp() * dawson(TAYLOR_LIMIT);
        assert!(rel(below, above) < 1e-14);
    }

    #[test]
    fn odd_symmetry_and_guard() {
        assert_eq!(erfi(-1.7).unwrap(), -erfi(1.7).unwrap());
        assert!(matches!(erfi(27.0), Err(Error::Range(_))));
        assert!(matches!(turn_on_factor(30.0), Err(Error::Range(_))));
        assert!(matches!(turn_on_factor(-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn continuous_approach_to_half() {
        let mut last = f64::INFINITY;
        for k in 1..12 {
            let s = 10f64.powi(-k);
            let dev = (turn_on_factor(s).unwrap() - Complex64::new(0.5, 0.0)).norm();
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 1e-11);
    }
}
