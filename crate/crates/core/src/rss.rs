//! Radial squeezed states ψ(r) = N r^α e^{-(γ₀ + iγ₁) r}.
//!
//! r²|ψ|² is a gamma distribution with shape 2α+3 and rate 2γ₀, so every
//! radial moment has a closed form.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::specfun::log_gamma_unchecked;
use crate::sqdt::{AtomModel, RadialEigenstate, RadialGrid, SampledWavefunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RssParams {
    pub alpha: f64,
    pub gamma0: f64,
    pub gamma1: f64,
}

impl RssParams {
    pub fn new(alpha: f64, gamma0: f64, gamma1: f64) -> Result<Self> {
        if !(alpha > -0.5) || !alpha.is_finite() {
            return Err(Error::domain(format!("RSS needs alpha > -1/2, got {alpha}")));
        }
        if !(gamma0 > 0.0) || !gamma0.is_finite() {
            return Err(Error::domain(format!("RSS needs gamma0 > 0, got {gamma0}")));
        }
        if !gamma1.is_finite() {
            return Err(Error::domain(format!("gamma1 must be finite, got {gamma1}")));
        }
        Ok(Self {
            alpha,
            gamma0,
            gamma1,
        })
    }

    /// Gamma-distribution shape 2α+3.
    fn shape(&self) -> f64 {
        2.0 * self.alpha + 3.0
    }

    /// ln |N|² = (2α+3) ln 2γ₀ - ln Γ(2α+3)
    pub fn ln_norm_squared(&self) -> f64 {
        let k = self.shape();
        k * (2.0 * self.gamma0).ln() - log_gamma_unchecked(k)
    }

    /// Mode r₀ = (α+1)/γ₀ of r²|ψ|².
    pub fn mode(&self) -> f64 {
        (self.alpha + 1.0) / self.gamma0
    }

    /// C₀ = f''(r₀)/f(r₀) = -2γ₀²/(α+1) for f = r²|ψ|².
    pub fn envelope_curvature(&self) -> f64 {
        -2.0 * self.gamma0 * self.gamma0 / (self.alpha + 1.0)
    }

    /// ψ(r), with r^α e^{-γ₀r} combined in log space.
    pub fn psi(&self, r: f64) -> Complex64 {
        if r <= 0.0 {
            return if self.alpha > 0.0 {
                Complex64::new(0.0, 0.0)
            } else if self.alpha == 0.0 {
                Complex64::new((0.5 * self.ln_norm_squared()).exp(), 0.0)
            } else {
                Complex64::new(f64::INFINITY, 0.0)
            };
        }
        let mag = (0.5 * self.ln_norm_squared() + self.alpha * r.ln() - self.gamma0 * r).exp();
        Complex64::from_polar(mag, -self.gamma1 * r)
    }

    /// r²|ψ(r)|², the gamma density.
    pub fn radial_density(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        (self.ln_norm_squared() + (2.0 * self.alpha + 2.0) * r.ln() - 2.0 * self.gamma0 * r).exp()
    }

    pub fn sample(&self, grid: &RadialGrid) -> SampledWavefunction {
        let p = *self;
        SampledWavefunction::from_fn(*grid, move |r| p.psi(r))
    }

    /// Interval holding all but a negligible tail of the density.
    pub fn support(&self) -> (f64, f64) {
        let mean = self.shape() / (2.0 * self.gamma0);
        let sd = self.shape().sqrt() / (2.0 * self.gamma0);
        let lo = (mean - 40.0 * sd).max(0.0);
        // the right tail of a low-shape gamma decays slowly
        let hi = mean + (40.0 + 400.0 / self.shape()) * sd;
        (lo, hi)
    }
}

/// |N|² = (2γ₀)^{2α+3} / Γ(2α+3).
pub fn norm_squared(params: &RssParams) -> f64 {
    params.ln_norm_squared().exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expectations {
    pub r: f64,
    pub inv_r: f64,
    pub r2: f64,
    pub inv_r2: f64,
    pub p: f64,
    pub p2: f64,
    pub h: f64,
}

pub fn expectations(params: &RssParams, l_star: f64) -> Expectations {
    let a = params.alpha;
    let g0 = params.gamma0;
    let g1 = params.gamma1;
    let inv_r = g0 / (a + 1.0);
    let inv_r2 = 2.0 * g0 * g0 / ((a + 1.0) * (2.0 * a + 1.0));
    let p2 = g0 * g0 / (2.0 * a + 1.0) + g1 * g1;
    Expectations {
        r: (2.0 * a + 3.0) / (2.0 * g0),
        inv_r,
        r2: (a + 2.0) * (2.0 * a + 3.0) / (2.0 * g0 * g0),
        inv_r2,
        p: -g1,
        p2,
        h: 0.5 * p2 + 0.5 * l_star * (l_star + 1.0) * inv_r2 - inv_r,
    }
}

/// The same expectations by direct quadrature over r²|ψ|², using
/// p_r ψ = -i((α+1)/r - γ₀ - iγ₁) ψ for the momentum moments.
pub fn expectations_by_quadrature(params: &RssParams, l_star: f64) -> Result<Expectations> {
    let (lo, hi) = params.support();
    let opts = QuadOptions {
        rel_tol: 1e-13,
        ..QuadOptions::default()
    };
    let moment = |g: &dyn Fn(f64) -> f64| -> Result<f64> {
        Ok(integrate(|r: f64| params.radial_density(r) * g(r), lo, hi, 64, opts)?.value)
    };
    let a1 = params.alpha + 1.0;
    let r = moment(&|r| r)?;
    let inv_r = moment(&|r| 1.0 / r)?;
    let r2 = moment(&|r| r * r)?;
    let inv_r2 = moment(&|r| 1.0 / (r * r))?;
    // ⟨p_r⟩ = -γ₁⟨1⟩ - i⟨(α+1)/r - γ₀⟩, and the imaginary part is zero by ⟨1/r⟩ = γ₀/(α+1)
    let p = -params.gamma1 * moment(&|_| 1.0)?;
    let p2 = moment(&|r| {
        let d = a1 / r - params.gamma0;
        d * d
    })? + params.gamma1 * params.gamma1;
    Ok(Expectations {
        r,
        inv_r,
        r2,
        inv_r2,
        p,
        p2,
        h: 0.5 * p2 + 0.5 * l_star * (l_star + 1.0) * inv_r2 - inv_r,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Uncertainties {
    pub dr: f64,
    pub dp: f64,
    pub product: f64,
}

pub fn uncertainties(params: &RssParams) -> Uncertainties {
    let a = params.alpha;
    let g0 = params.gamma0;
    Uncertainties {
        dr: (2.0 * a + 3.0).sqrt() / (2.0 * g0),
        dp: g0 / (2.0 * a + 1.0).sqrt(),
        product: 0.5 * ((2.0 * a + 3.0) / (2.0 * a + 1.0)).sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    pub samples: Vec<f64>,
    /// Mode (α+1)/γ₀.
    pub r0: f64,
    /// f''(r₀)/f(r₀) = -2γ₀²/(α+1).
    pub c0: f64,
}

pub fn distribution(params: &RssParams, grid: &RadialGrid) -> Distribution {
    let samples = grid.points().into_iter().map(|r| params.radial_density(r)).collect();
    Distribution {
        samples,
        r0: params.mode(),
        c0: params.envelope_curvature(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RssMoments {
    pub mean: f64,
    pub variance: f64,
    /// m_0 ..= m_kmax about the mean.
    pub central_moments: Vec<f64>,
}

/// Central moments from the gamma cumulants κ_n = k (n-1)! θⁿ via
/// m_n = Σ_{j=0}^{n-2} C(n-1, j) κ_{n-j} m_j.
pub fn moments(params: &RssParams, k_max: usize) -> Result<RssMoments> {
    if k_max < 2 {
        return Err(Error::domain(format!("moments need k_max >= 2, got {k_max}")));
    }
    let shape = params.shape();
    let theta = 1.0 / (2.0 * params.gamma0);
    let mut kappa = vec![0.0; k_max + 1];
    let mut fact = 1.0;
    for (n, slot) in kappa.iter_mut().enumerate().skip(1) {
        if n > 1 {
            fact *= (n - 1) as f64;
        }
        *slot = shape * fact * theta.powi(n as i32);
    }
    let mut m = vec![0.0; k_max + 1];
    m[0] = 1.0;
    for n in 2..=k_max {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for j in 0..=n - 2 {
            acc += binom * kappa[n - j] * m[j];
            binom *= (n - 1 - j) as f64 / (j + 1) as f64;
        }
        m[n] = acc;
    }
    Ok(RssMoments {
        mean: shape * theta,
        variance: m[2],
        central_moments: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorUncertainty {
    pub d_r: f64,
    pub d_p: f64,
    /// (1/2f)⟨1/r²⟩
    pub bound: f64,
}

/// ΔR and ΔP for R = 1/r - 1/[l*(l*+1)] and P = p_r/f by quadrature, with f = l*/l.
pub fn oscillator_uncertainty(params: &RssParams, l: u32, l_star: f64) -> Result<OscillatorUncertainty> {
    if l == 0 || !(l_star > 0.0) {
        return Err(Error::domain("oscillator variables need l >= 1 and l* > 0"));
    }
    let f = l_star / l as f64;
    let (lo, hi) = params.support();
    let opts = QuadOptions {
        rel_tol: 1e-13,
        ..QuadOptions::default()
    };
    let moment = |g: &dyn Fn(f64) -> f64| -> Result<f64> {
        Ok(integrate(|r: f64| params.radial_density(r) * g(r), lo, hi, 64, opts)?.value)
    };
    // R differs from 1/r by a constant, so its spread is that of 1/r
    let inv_r = moment(&|r| 1.0 / r)?;
    let var_big_r = moment(&|r| (1.0 / r - inv_r).powi(2))?;
    let inv_r2 = moment(&|r| 1.0 / (r * r))?;
    // p_r - ⟨p_r⟩ acts as -i((α+1)/r - γ₀) on ψ
    let a1 = params.alpha + 1.0;
    let var_p = moment(&|r| (a1 / r - params.gamma0).powi(2))?;
    Ok(OscillatorUncertainty {
        d_r: var_big_r.sqrt(),
        d_p: var_p.sqrt() / f,
        bound: inv_r2 / (2.0 * f),
    })
}

/// Outcome of fixing (α, γ₀, γ₁) at the quantum outer turning point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RssInit {
    pub params: RssParams,
    pub n_star: f64,
    pub l_star: f64,
    /// n*²[1 + √(1 - l*(l*+1)/n*²)]
    pub r_out: f64,
    pub target_energy: f64,
    /// Relative residuals of ⟨r⟩ = r_out and ⟨H⟩ = E.
    pub residual_r: f64,
    pub residual_h: f64,
    pub iterations: usize,
}

pub const INIT_TOLERANCE: f64 = 1e-10;

pub fn initialize(atom: &AtomModel, n_bar: u32, l: u32) -> Result<RssParams> {
    Ok(initialize_report(atom, n_bar, l)?.params)
}

pub fn initialize_report(atom: &AtomModel, n_bar: u32, l: u32) -> Result<RssInit> {
    let st = RadialEigenstate::new(atom, n_bar, l)?;
    initialize_effective(st.n_star, st.l_star, n_bar)
}

/// Solve ⟨H⟩(α, γ₀(α)) = -1/2n*² with γ₀ = (2α+3)/(2 r_out) and γ₁ = 0,
/// bracketing α in (0, 10 n̄].
pub fn initialize_effective(n_star: f64, l_star: f64, n_bar: u32) -> Result<RssInit> {
    let c = l_star * (l_star + 1.0);
    if !(n_star * n_star > c) {
        return Err(Error::domain(format!(
            "n*² = {} must exceed l*(l*+1) = {c}",
            n_star * n_star
        )));
    }
    let r_out = n_star * n_star * (1.0 + (1.0 - c / (n_star * n_star)).sqrt());
    let target = -0.5 / (n_star * n_star);
    let residual = |alpha: f64| -> f64 {
        let g0 = (2.0 * alpha + 3.0) / (2.0 * r_out);
        let p = RssParams {
            alpha,
            gamma0: g0,
            gamma1: 0.0,
        };
        (expectations(&p, l_star).h - target) / target.abs()
    };
    let mut lo = 1e-9;
    let mut hi = 10.0 * n_bar.max(1) as f64;
    let (mut f_lo, f_hi) = (residual(lo), residual(hi));
    if f_lo.signum() == f_hi.signum() {
        let profile = (0..=40)
            .map(|i| {
                let a = lo + (hi - lo) * i as f64 / 40.0;
                (a, residual(a))
            })
            .collect();
        return Err(Error::Solver {
            message: format!(
                "no sign change of the energy residual for alpha in ({lo}, {hi}] \
                 (n*={n_star}, l*={l_star})"
            ),
            profile,
        });
    }
    let mut iterations = 0;
    // bisect to a narrow bracket, then Illinois-style false position
    while hi - lo > 1e-3 * hi.max(1.0) && iterations < 200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let f_mid = residual(mid);
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let mut f_hi = residual(hi);
    let mut side = 0i8;
    let mut alpha = 0.5 * (lo + hi);
    for _ in 0..100 {
        iterations += 1;
        alpha = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if !(alpha > lo && alpha < hi) {
            alpha = 0.5 * (lo + hi);
        }
        let f = residual(alpha);
        if f == 0.0 || (hi - lo) < 4.0 * f64::EPSILON * alpha {
            break;
        }
        if f.signum() == f_lo.signum() {
            lo = alpha;
            f_lo = f;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = alpha;
            f_hi = f;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        if f.abs() < 1e-15 {
            break;
        }
    }
    let params = RssParams::new(alpha, (2.0 * alpha + 3.0) / (2.0 * r_out), 0.0)?;
    let ex = expectations(&params, l_star);
    let residual_r = ((ex.r - r_out) / r_out).abs();
    let residual_h = ((ex.h - target) / target).abs();
    if residual_r > INIT_TOLERANCE || residual_h > INIT_TOLERANCE {
        return Err(Error::Solver {
            message: format!(
                "initialization residuals {residual_r:.2e} (r), {residual_h:.2e} (H) exceed {INIT_TOLERANCE:e}"
            ),
            profile: vec![(alpha, residual_h)],
        });
    }
    Ok(RssInit {
        params,
        n_star,
        l_star,
        r_out,
        target_energy: target,
        residual_r,
        residual_h,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn norm_examples() {
        assert!(rel(norm_squared(&RssParams::new(0.0, 1.0, 0.0).unwrap()), 4.0) < 1e-14);
        assert!(rel(norm_squared(&RssParams::new(1.0, 0.5, 0.0).unwrap()), 1.0 / 24.0) < 1e-14);
        let big = RssParams::new(168.225, 0.0117465, 0.0).unwrap();
        assert!(rel(big.ln_norm_squared(), -2909.936_420_008_092_6) < 1e-13);
        assert!(RssParams::new(-0.6, 1.0, 0.0).is_err());
        assert!(RssParams::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn density_integrates_to_one() {
        let big = RssParams::new(168.225, 0.0117465, 0.0).unwrap();
        let (lo, hi) = big.support();
        let v = integrate(|r: f64| big.radial_density(r), lo, hi, 32, QuadOptions::default())
            .unwrap()
            .value;
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ground_state_expectations() {
        let p = RssParams::new(0.0, 1.0, 0.0).unwrap();
        let e = expectations(&p, 0.0);
        assert_eq!((e.r, e.inv_r), (1.5, 1.0));
        assert!((e.h + 0.5).abs() < 1e-15);
        let u = uncertainties(&p);
        assert!((u.product - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_triples() {
        let h = RssParams::new(168.225, 0.0117465, 0.0).unwrap();
        let e = expectations(&h, 1.0);
        assert!((e.r - 14449.0).abs() < 1.0);
        assert!(rel(e.h, -0.5 / 85f64.powi(2)) < 1e-4);
        assert!((uncertainties(&h).product - 0.50148).abs() < 1e-5);
        let rb = RssParams::new(162.91, 0.0121233, 0.0).unwrap();
        assert!(rel(expectations(&rb, 1.35).h, -0.5 / 82.35f64.powi(2)) < 1e-4);
        let k = RssParams::new(120.306, 0.0142822, 0.0).unwrap();
        assert!((uncertainties(&k).product - 0.50207).abs() < 1e-5);
    }

    #[test]
    fn uncertainty_product_ignores_gamma1() {
        let a = RssParams::new(12.5, 0.3, 0.0).unwrap();
        let b = RssParams::new(12.5, 0.3, 4.2).unwrap();
        assert_eq!(uncertainties(&a).product, uncertainties(&b).product);
    }

    #[test]
    fn distribution_mode_and_curvature() {
        let p = RssParams::new(5.0, 0.5, 0.0).unwrap();
        let g = RadialGrid::new(0.0, 60.0, 6001).unwrap();
        let d = distribution(&p, &g);
        assert_eq!(d.r0, 12.0);
        let imax = d
            .samples
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > d.samples[best] { i } else { best });
        assert!((g.point(imax) - d.r0).abs() <= g.spacing());
        let h = RssParams::new(168.225, 0.0117465, 0.0).unwrap();
        let c0 = distribution(&h, &RadialGrid::new(0.0, 1.0, 2).unwrap()).c0;
        assert!(rel(c0, -1.630_731_419_707_49e-6) < 1e-12);
        let r0 = (h.alpha + 1.0) / h.gamma0;
        let step = 1.0;
        let fd = (h.radial_density(r0 + step) - 2.0 * h.radial_density(r0)
            + h.radial_density(r0 - step))
            / (step * step * h.radial_density(r0));
        assert!(rel(fd, c0) < 1e-5);
    }

    #[test]
    fn gamma_moments() {
        let p = RssParams::new(3.0, 1.0, 0.0).unwrap();
        let m = moments(&p, 6).unwrap();
        assert_eq!(m.central_moments[0], 1.0);
        assert_eq!(m.central_moments[1], 0.0);
        assert!(rel(m.variance, 2.25) < 1e-15);
        assert!(rel(m.central_moments[3], 2.25) < 1e-14);
        assert!(rel(m.central_moments[4], 18.5625) < 1e-14);
        assert_eq!(m.variance, uncertainties(&p).dr.powi(2));
        // m_5, m_6 by quadrature
        let (lo, hi) = p.support();
        for k in [5, 6] {
            let q = integrate(
                |r: f64| p.radial_density(r) * (r - m.mean).powi(k),
                lo,
                hi,
                64,
                QuadOptions::default(),
            )
            .unwrap()
            .value;
            assert!(rel(m.central_moments[k as usize], q) < 1e-10);
        }
        assert!(moments(&p, 1).is_err());
    }

    #[test]
    fn minimum_uncertainty_equality() {
        let h = RssParams::new(168.225, 0.0117465, 0.0).unwrap();
        let u = oscillator_uncertainty(&h, 1, 1.0).unwrap();
        assert!(rel(u.d_r * u.d_p, u.bound) < 1e-8);
        assert!(rel(u.d_r, 3.778_672_422_145_117_7e-6) < 1e-8);
        let rb = RssParams::new(40.0, 0.2, 0.03).unwrap();
        let u = oscillator_uncertainty(&rb, 1, 1.35).unwrap();
        assert!(rel(u.d_p, uncertainties(&rb).dp / 1.35) < 1e-8);
        assert!(rel(u.d_r * u.d_p, u.bound) < 1e-8);
    }

    #[test]
    fn defining_equation_by_finite_differences() {
        let p = RssParams::new(7.3, 0.8, 0.45).unwrap();
        let beta = Complex64::new(p.gamma0, p.gamma1);
        let residual = |r: f64, h: f64| {
            let d = (p.psi(r + h) - p.psi(r - h)) / (2.0 * h);
            let lhs = d - p.psi(r) * (p.alpha / r) + beta * p.psi(r);
            lhs.norm() / (p.psi(r).norm() * (p.alpha / r + beta.norm()))
        };
        for i in 2..40 {
            let r = 0.5 * i as f64;
            assert!(residual(r, 1e-4) < 1e-6, "r={r}");
        }
        // second order in the step
        let ratio = residual(3.0, 2e-3) / residual(3.0, 1e-3);
        assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
    }

    #[test]
    fn initialization_matches_golden_hydrogen_and_rubidium() {
        let h = initialize_report(&AtomModel::hydrogen(), 85, 1).unwrap();
        assert!((h.params.alpha - 168.225).abs() < 0.01);
        assert!((h.params.gamma0 - 0.0117465).abs() < 1e-6);
        assert!(h.residual_h <= 1e-10 && h.residual_r <= 1e-10);
        let rb = initialize(&AtomModel::builtin("rubidium").unwrap(), 85, 1).unwrap();
        assert!((rb.alpha - 162.91).abs() < 0.01);
        assert!((rb.gamma0 - 0.0121233).abs() < 1e-6);
    }

    #[test]
    fn initialization_reports_missing_root() {
        // an n̄ bound of 0 collapses the bracket
        match initialize_effective(85.0, 1.0, 0) {
            Err(Error::Solver { profile, .. }) => assert_eq!(profile.len(), 41),
            other => panic!("{other:?}"),
        }
    }
}
