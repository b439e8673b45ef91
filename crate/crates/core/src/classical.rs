//! Classical orbits in the effective SQDT potential
//! U(r) = -1/r + (l*² - l²)/2r².
//!
//! The radial motion is Kepler-like with angular momentum l*, while the
//! angle advances with the true angular momentum l, so the ellipse
//! precesses with f = l*/l.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Outer and inner turning points n*²(1 ∓ √(1 - l*²/n*²)).
pub fn apsidal_points(n_star: f64, l_star: f64) -> Result<(f64, f64)> {
    if !(n_star > 0.0) || !(l_star >= 0.0) {
        return Err(Error::domain(format!(
            "apsidal points need n* > 0 and l* >= 0, got n*={n_star}, l*={l_star}"
        )));
    }
    if l_star > n_star {
        return Err(Error::domain(format!(
            "l* = {l_star} exceeds n* = {n_star}: no bound orbit"
        )));
    }
    let a = n_star * n_star;
    let e = eccentricity(n_star, l_star);
    // r1 = a(1 - e) written without cancellation
    let r1 = l_star * l_star / (1.0 + e);
    Ok((r1, a * (1.0 + e)))
}

fn eccentricity(n_star: f64, l_star: f64) -> f64 {
    let q = l_star / n_star;
    ((1.0 - q) * (1.0 + q)).max(0.0).sqrt()
}

/// Radial period 2π n*³ in atomic units.
pub fn kepler_period(n_star: f64) -> f64 {
    2.0 * PI * n_star.powi(3)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitParams {
    /// E* = -1/(2n*²), hartree.
    pub energy: f64,
    /// Classical angular momentum.
    pub l: f64,
    pub l_star: f64,
    pub n_star: f64,
    pub eccentricity: f64,
    /// f = l*/l
    pub f_ratio: f64,
    pub theta0: f64,
}

impl OrbitParams {
    /// Orbit with θ₀ fixed by fθ₀ = π/2.
    pub fn new(n_star: f64, l_star: f64, l: f64) -> Result<Self> {
        if !(l > 0.0) || !(l_star > 0.0) {
            return Err(Error::domain(format!(
                "orbit needs l > 0 and l* > 0, got l={l}, l*={l_star}"
            )));
        }
        apsidal_points(n_star, l_star)?;
        let f = l_star / l;
        Ok(Self {
            energy: -0.5 / (n_star * n_star),
            l,
            l_star,
            n_star,
            eccentricity: eccentricity(n_star, l_star),
            f_ratio: f,
            theta0: 0.5 * PI / f,
        })
    }

    pub fn with_theta0(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    /// a = 1/(2|E*|) = n*²
    pub fn semimajor_axis(&self) -> f64 {
        self.n_star * self.n_star
    }

    pub fn apsides(&self) -> (f64, f64) {
        let a = self.semimajor_axis();
        (self.l_star * self.l_star / (1.0 + self.eccentricity), a * (1.0 + self.eccentricity))
    }

    pub fn period(&self) -> f64 {
        kepler_period(self.n_star)
    }

    /// Angle by which the apse line falls behind per radial period, 2π(1 - 1/f).
    pub fn precession_per_orbit(&self) -> f64 {
        2.0 * PI * (1.0 - 1.0 / self.f_ratio)
    }

    pub fn radius_at(&self, theta: f64) -> f64 {
        let ls2 = self.l_star * self.l_star;
        ls2 / (1.0 + self.eccentricity * (self.f_ratio * (theta - self.theta0)).cos())
    }

    /// Radial momentum ṙ at angle θ, from differentiating the orbit equation.
    pub fn radial_momentum_at(&self, theta: f64) -> f64 {
        let phase = self.f_ratio * (theta - self.theta0);
        self.eccentricity * self.f_ratio * self.l * phase.sin() / (self.l_star * self.l_star)
    }

    /// ½p_r² + l*²/2r² - 1/r
    pub fn hamiltonian(&self, r: f64, p_r: f64) -> f64 {
        0.5 * p_r * p_r + 0.5 * self.l_star * self.l_star / (r * r) - 1.0 / r
    }

    /// Oscillator energy ½P² + ½l²R² = e²/(2f²l*²).
    pub fn oscillator_energy(&self) -> f64 {
        let e = self.eccentricity;
        let f = self.f_ratio;
        e * e / (2.0 * f * f * self.l_star * self.l_star)
    }
}

/// r(θ) = l*² / (1 + e cos[f(θ - θ₀)]) at each sample angle.
pub fn orbit_trace(params: &OrbitParams, theta_samples: &[f64]) -> Vec<(f64, f64)> {
    theta_samples
        .iter()
        .map(|&th| (th, params.radius_at(th)))
        .collect()
}

/// R = 1/r - 1/l*² = (e/l*²) sin fθ and P = -(e l/l*²) cos fθ.
pub fn oscillator_variables(params: &OrbitParams, theta: f64) -> (f64, f64) {
    let ls2 = params.l_star * params.l_star;
    let (s, c) = (params.f_ratio * theta).sin_cos();
    let big_r = params.eccentricity / ls2 * s;
    let big_p = -params.eccentricity * params.l / ls2 * c;
    (big_r, big_p)
}

/// Time for r₁ → r₂ → r₁ from ∫ dr / p_r, evaluated with the substitution
/// r = a(1 - e cos η) that removes the turning-point singularities.
pub fn radial_period_by_quadrature(params: &OrbitParams) -> Result<f64> {
    let a = params.semimajor_axis();
    let e = params.eccentricity;
    let two_abs_e = -2.0 * params.energy;
    let (r1, r2) = params.apsides();
    let half = integrate(
        |eta: f64| {
            let r = a * (1.0 - e * eta.cos());
            let dr = a * e * eta.sin();
            // p_r² = 2E + 2/r - l*²/r² in factored form
            let pr2 = two_abs_e * (r - r1) * (r2 - r) / (r * r);
            if pr2 <= 0.0 {
                return r * a.sqrt();
            }
            dr / pr2.sqrt()
        },
        0.0,
        PI,
        16,
        QuadOptions {
            rel_tol: 1e-12,
            ..QuadOptions::default()
        },
    )?;
    Ok(2.0 * half.value)
}

/// State (r, θ, ṙ) of a planar orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitState {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub p_r: f64,
}

/// Integrate r̈ = l*²/r³ - 1/r², θ̇ = l/r² with adaptive Dormand–Prince
/// 5(4) steps until `stop` returns true or `t_max` is reached.
pub fn integrate_orbit<S>(
    params: &OrbitParams,
    start: OrbitState,
    t_max: f64,
    tol: f64,
    mut stop: S,
) -> Result<Vec<OrbitState>>
where
    S: FnMut(&OrbitState, &OrbitState) -> bool,
{
    let ls2 = params.l_star * params.l_star;
    let l = params.l;
    let rhs = |y: [f64; 3]| -> [f64; 3] {
        let r = y[0];
        [y[2], l / (r * r), ls2 / (r * r * r) - 1.0 / (r * r)]
    };
    let mut out = vec![start];
    let mut y = [start.r, start.theta, start.p_r];
    let mut t = start.t;
    let mut h = params.period() * 1e-4;
    let mut steps = 0usize;
    while t < t_max {
        steps += 1;
        if steps > 10_000_000 {
            return Err(Error::Numerical("orbit integration exceeded the step budget".into()));
        }
        h = h.min(t_max - t);
        let (y_new, err) = dormand_prince_step(&rhs, y, h);
        let scale: f64 = (0..3)
            .map(|i| err[i] / (tol * (1.0 + y[i].abs().max(y_new[i].abs()))))
            .fold(0.0, |m, v| m.max(v.abs()));
        if scale <= 1.0 {
            t += h;
            y = y_new;
            let state = OrbitState {
                t,
                r: y[0],
                theta: y[1],
                p_r: y[2],
            };
            let prev = *out.last().unwrap();
            out.push(state);
            if stop(&prev, &state) {
                break;
            }
        }
        let factor = if scale == 0.0 { 5.0 } else { 0.9 * scale.powf(-0.2) };
        h *= factor.clamp(0.2, 5.0);
        if h < 1e-12 * params.period() {
            return Err(Error::Numerical("orbit integration step collapsed".into()));
        }
    }
    Ok(out)
}

fn dormand_prince_step<F: Fn([f64; 3]) -> [f64; 3]>(f: &F, y: [f64; 3], h: f64) -> ([f64; 3], [f64; 3]) {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut k = [[0.0; 3]; 7];
    k[0] = f(y);
    for s in 0..6 {
        let mut ys = y;
        for (j, kj) in k.iter().enumerate().take(s + 1) {
            for i in 0..3 {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        k[s + 1] = f(ys);
    }
    // row 6 of A holds the fifth-order weights (FSAL)
    let mut y5 = y;
    for j in 0..6 {
        for i in 0..3 {
            y5[i] += h * A[5][j] * k[j][i];
        }
    }
    let mut err = [0.0; 3];
    for (j, ej) in E.iter().enumerate() {
        for i in 0..3 {
            err[i] += h * ej * k[j][i];
        }
    }
    (y5, err)
}

/// Angle swept between consecutive perihelion passages, found by
/// integrating the equations of motion. Equals 2π/f analytically.
pub fn perihelion_sweep_numerical(params: &OrbitParams, tol: f64) -> Result<f64> {
    let (r1, _) = params.apsides();
    let start = OrbitState {
        t: 0.0,
        r: r1,
        theta: 0.0,
        p_r: 0.0,
    };
    let traj = integrate_orbit(params, start, 3.0 * params.period(), tol, |a, b| {
        a.p_r < 0.0 && b.p_r >= 0.0
    })?;
    let n = traj.len();
    if n < 3 {
        return Err(Error::Numerical("no perihelion passage found".into()));
    }
    let (a, b) = (traj[n - 2], traj[n - 1]);
    // interpolate θ at p_r = 0
    let w = -a.p_r / (b.p_r - a.p_r);
    Ok(a.theta + w * (b.theta - a.theta))
}
