use super::level::RadialEigenstate;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, QuadOptions};

/// ∫₀^∞ R_a(r) r^power R_b(r) r² dr for power in -2..=2.
pub fn radial_overlap(a: &RadialEigenstate, b: &RadialEigenstate, power: i32) -> Result<f64> {
    radial_overlap_with(a, b, power, QuadOptions::default())
}

pub fn radial_overlap_with(
    a: &RadialEigenstate,
    b: &RadialEigenstate,
    power: i32,
    opts: QuadOptions,
) -> Result<f64> {
    if !(-2..=2).contains(&power) {
        return Err(Error::domain(format!("overlap power must lie in -2..=2, got {power}")));
    }
    if power == -2 && a.l_star + b.l_star <= -1.0 {
        return Err(Error::domain("<1/r²> diverges for these channels"));
    }
    // the product decays at least as fast as the more compact state
    let r_cut = a.extent().min(b.extent());
    let panels = 2 * (a.degree + b.degree) as usize + 8;
    let root = r_cut.sqrt();
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| {
            let s = root * i as f64 / panels as f64;
            s * s
        })
        .collect();
    let p = power + 2;
    let res = integrate_panels(
        |r: f64| {
            if r == 0.0 {
                return 0.0;
            }
            a.eval(r) * b.eval(r) * r.powi(p)
        },
        &breaks,
        opts,
    )
    .map_err(|e| {
        Error::Numerical(format!(
            "overlap <n={},l={}|r^{power}|n={},l={}> on [0, {r_cut:.1}]: {e}",
            a.n, a.l, b.n, b.l
        ))
    })?;
    Ok(res.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: u32, l: u32) -> RadialEigenstate {
        RadialEigenstate::hydrogen(n, l).unwrap()
    }

    #[test]
    fn normalization_and_orthogonality() {
        for (n, l) in [(1, 0), (2, 1), (5, 3), (40, 1), (85, 1)] {
            let s = h(n, l);
            assert!((radial_overlap(&s, &s, 0).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(radial_overlap(&h(2, 1), &h(3, 1), 0).unwrap().abs() < 1e-14);
        assert!(radial_overlap(&h(84, 1), &h(85, 1), 0).unwrap().abs() < 1e-10);
    }

    #[test]
    fn hydrogen_expectations() {
        // <r> = [3n² - l(l+1)]/2, <1/r> = 1/n², <1/r²> = 1/(n³(l+1/2))
        for (n, l) in [(3u32, 1u32), (10, 2), (30, 1)] {
            let s = h(n, l);
            let nf = n as f64;
            let lf = l as f64;
            let r1 = radial_overlap(&s, &s, 1).unwrap();
            assert!((r1 - (3.0 * nf * nf - lf * (lf + 1.0)) / 2.0).abs() / r1 < 1e-12);
            let rm1 = radial_overlap(&s, &s, -1).unwrap();
            assert!((rm1 * nf * nf - 1.0).abs() < 1e-12);
            let rm2 = radial_overlap(&s, &s, -2).unwrap();
            assert!((rm2 * nf.powi(3) * (lf + 0.5) - 1.0).abs() < 1e-11);
            let r2 = radial_overlap(&s, &s, 2).unwrap();
            let want = nf * nf * (5.0 * nf * nf + 1.0 - 3.0 * lf * (lf + 1.0)) / 2.0;
            assert!((r2 - want).abs() / want < 1e-12);
        }
    }

    #[test]
    fn dipole_2p_1s() {
        let v = radial_overlap(&h(2, 1), &h(1, 0), 1).unwrap();
        // 2^7 √6 / 3^5
        assert!((v - 1.290_266_201_959_863_4).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_power() {
        assert!(radial_overlap(&h(2, 1), &h(2, 1), 3).is_err());
    }
}
