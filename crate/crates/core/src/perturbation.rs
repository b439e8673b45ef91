//! First-order packet formation by a Gaussian laser pulse.
//!
//! With the field envelope 𝓔₀ exp(-4 ln2 t²/τ²) and the rotating-wave
//! approximation, the excited amplitudes are
//! a_n = i ⟨n*,l*| r |i⟩ exp(-δ_n² τ² / 16 ln2) with δ_n = E_n - E_i - ω.

use std::f64::consts::LN_2;

use errorfunctions::ComplexErrorFunctions;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::classical::kepler_period;
use crate::error::{Error, Result};
use crate::sqdt::{radial_overlap, AtomModel, RadialEigenstate, RadialGrid};
use crate::units::ps_to_au;

/// Edge amplitudes must fall below this fraction of the peak.
pub const WINDOW_EDGE_FRACTION: f64 = 0.01;
pub const DEFAULT_HALF_WIDTH: u32 = 10;
const MAX_HALF_WIDTH: u32 = 80;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PulseSpec {
    /// FWHM of the field envelope in ps.
    pub tau_ps: f64,
    /// The same width in atomic units.
    pub tau: f64,
    pub n_bar: u32,
    /// Carrier frequency E_n̄ - E_i, hartree.
    pub omega: f64,
    pub amplitude: f64,
}

impl PulseSpec {
    /// Pulse tuned to the centre level: ω = E_n̄* - E_i*.
    pub fn tuned(tau_ps: f64, centre: &RadialEigenstate, ground: &RadialEigenstate) -> Result<Self> {
        Self::new(tau_ps, centre.n, centre.energy - ground.energy, 1.0)
    }

    pub fn new(tau_ps: f64, n_bar: u32, omega: f64, amplitude: f64) -> Result<Self> {
        if !(tau_ps > 0.0) || !tau_ps.is_finite() {
            return Err(Error::Config(format!("pulse width must be positive, got {tau_ps} ps")));
        }
        if !(omega > 0.0) {
            return Err(Error::Config(format!(
                "carrier frequency must be positive, got {omega} hartree"
            )));
        }
        Ok(Self {
            tau_ps,
            tau: ps_to_au(tau_ps),
            n_bar,
            omega,
            amplitude,
        })
    }
}

/// 𝓔(t) = 𝓔₀ exp(-4 ln2 t²/τ²), t in atomic units.
pub fn envelope(t: f64, pulse: &PulseSpec) -> f64 {
    pulse.amplitude * (-4.0 * LN_2 * t * t / (pulse.tau * pulse.tau)).exp()
}

/// exp(-(e_n - e_bar)² τ² / 16 ln2), τ in atomic units.
pub fn spectral_weight(e_n: f64, e_bar: f64, tau: f64) -> f64 {
    let d = e_n - e_bar;
    (-d * d * tau * tau / (16.0 * LN_2)).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct PacketAmplitudes {
    pub atom: String,
    pub window: (u32, u32),
    pub ground: RadialEigenstate,
    pub pulse: PulseSpec,
    pub states: Vec<RadialEigenstate>,
    /// Radial dipole ⟨n*,l*| r |i⟩ per state.
    pub dipoles: Vec<f64>,
    /// δ_n = E_n - E_i - ω.
    pub detunings: Vec<f64>,
    pub amps: Vec<Complex64>,
    pub warnings: Vec<String>,
}

impl PacketAmplitudes {
    pub fn amplitude(&self, n: u32) -> Option<Complex64> {
        self.states.iter().position(|s| s.n == n).map(|i| self.amps[i])
    }

    pub fn max_amplitude(&self) -> f64 {
        self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest edge amplitude over the peak amplitude.
    pub fn edge_ratio(&self) -> f64 {
        edge_ratio(&self.amps)
    }

    /// Time after which first-order theory is no longer trusted (≈1.5 orbits).
    pub fn validity_horizon(&self) -> f64 {
        let centre = self
            .states
            .iter()
            .find(|s| s.n == self.pulse.n_bar)
            .map(|s| s.n_star)
            .unwrap_or(self.pulse.n_bar as f64);
        1.5 * kepler_period(centre)
    }

    /// Multiply every amplitude by a unit phase.
    pub fn with_global_phase(mut self, phase: f64) -> Self {
        let u = Complex64::from_polar(1.0, phase);
        for a in &mut self.amps {
            *a *= u;
        }
        self
    }
}

fn edge_ratio(amps: &[Complex64]) -> f64 {
    let max = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if amps.len() < 2 || max == 0.0 {
        return 0.0;
    }
    amps[0].norm().max(amps[amps.len() - 1].norm()) / max
}

fn lowest_level(atom: &AtomModel, l: u32) -> Result<u32> {
    let ch = atom.channel(l)?;
    Ok(l + 1 + ch.susy_int)
}

/// Amplitudes over an explicit window `[n_lo, n_hi]` (p channel). An
/// inadequate window produces a warning naming a wider one.
pub fn packet_amplitudes(
    atom: &AtomModel,
    ground: &RadialEigenstate,
    pulse: &PulseSpec,
    window: (u32, u32),
) -> Result<PacketAmplitudes> {
    let (n_lo, n_hi) = window;
    if n_lo > pulse.n_bar || n_hi < pulse.n_bar {
        return Err(Error::Config(format!(
            "window [{n_lo}, {n_hi}] does not contain n_bar = {}",
            pulse.n_bar
        )));
    }
    let l = 1;
    let states = (n_lo..=n_hi)
        .map(|n| RadialEigenstate::new(atom, n, l))
        .collect::<Result<Vec<_>>>()?;
    let dipoles = states
        .par_iter()
        .map(|s| radial_overlap(s, ground, 1))
        .collect::<Result<Vec<_>>>()?;
    let detunings: Vec<f64> = states
        .iter()
        .map(|s| s.energy - ground.energy - pulse.omega)
        .collect();
    let amps: Vec<Complex64> = dipoles
        .iter()
        .zip(&detunings)
        .map(|(&d, &delta)| {
            Complex64::new(0.0, d * pulse.amplitude * spectral_weight(delta, 0.0, pulse.tau))
        })
        .collect();
    let mut out = PacketAmplitudes {
        atom: atom.name.clone(),
        window,
        ground: *ground,
        pulse: *pulse,
        states,
        dipoles,
        detunings,
        amps,
        warnings: Vec::new(),
    };
    if out.states.len() > 1 && out.edge_ratio() > WINDOW_EDGE_FRACTION {
        let suggestion = adequate_window(atom, ground, pulse).ok();
        let hint = match suggestion {
            Some((a, b)) => format!("; [{a}, {b}] satisfies it"),
            None => String::new(),
        };
        out.warnings.push(format!(
            "window [{n_lo}, {n_hi}] edge amplitude is {:.3} of the peak (limit {WINDOW_EDGE_FRACTION}){hint}",
            out.edge_ratio()
        ));
    }
    Ok(out)
}

/// Amplitudes over n̄ ± 10, widened side by side until both edges satisfy
/// the edge criterion.
pub fn packet_amplitudes_auto(
    atom: &AtomModel,
    ground: &RadialEigenstate,
    pulse: &PulseSpec,
) -> Result<PacketAmplitudes> {
    let window = adequate_window(atom, ground, pulse)?;
    packet_amplitudes(atom, ground, pulse, window)
}

fn adequate_window(atom: &AtomModel, ground: &RadialEigenstate, pulse: &PulseSpec) -> Result<(u32, u32)> {
    let floor = lowest_level(atom, 1)?;
    let n_bar = pulse.n_bar;
    let peak = single_amplitude(atom, ground, pulse, n_bar)?;
    let limit = WINDOW_EDGE_FRACTION * peak;
    let mut lo = n_bar.saturating_sub(DEFAULT_HALF_WIDTH).max(floor);
    while lo > floor && single_amplitude(atom, ground, pulse, lo)? > limit {
        if n_bar - lo >= MAX_HALF_WIDTH {
            return Err(Error::Config(format!(
                "no adequate window below n_bar within {MAX_HALF_WIDTH} levels"
            )));
        }
        lo -= 1;
    }
    let mut hi = n_bar + DEFAULT_HALF_WIDTH;
    while single_amplitude(atom, ground, pulse, hi)? > limit {
        if hi - n_bar >= MAX_HALF_WIDTH {
            return Err(Error::Config(format!(
                "no adequate window above n_bar within {MAX_HALF_WIDTH} levels"
            )));
        }
        hi += 1;
    }
    Ok((lo, hi))
}

fn single_amplitude(atom: &AtomModel, ground: &RadialEigenstate, pulse: &PulseSpec, n: u32) -> Result<f64> {
    let s = RadialEigenstate::new(atom, n, 1)?;
    let d = radial_overlap(&s, ground, 1)?;
    let delta = s.energy - ground.energy - pulse.omega;
    Ok((d * pulse.amplitude * spectral_weight(delta, 0.0, pulse.tau)).abs())
}

/// Per-state time factor multiplying a_n in the packet sum.
///
/// For `formation = false` this is e^{-iE_n t}. For `formation = true` it
/// is ½[1 + erf(√c t - i δ_n/(2√c))] e^{-iE_n t} with c = 4 ln2/τ², which
/// equals the turn-on factor at t = 0 and tends to e^{-iE_n t} once the
/// pulse is over.
pub fn time_factor(energy: f64, detuning: f64, tau: f64, t: f64, formation: bool) -> Complex64 {
    let phase = Complex64::from_polar(1.0, -energy * t);
    if !formation {
        return phase;
    }
    let weight = spectral_weight(detuning, 0.0, tau);
    if weight == 0.0 {
        return phase;
    }
    weighted_formation_factor(detuning, tau, t) / weight * phase
}

/// weight(δ) · ½[1 + erf(z)] with z = √c t - iδ/(2√c), written through the
/// Faddeeva function so that large |δ| cannot overflow:
/// e^{-y²} - ½ e^{-x² + 2iσxy} w(σy + ix), x = √c t, y = |δ|/(2√c).
pub fn weighted_formation_factor(detuning: f64, tau: f64, t: f64) -> Complex64 {
    let sqrt_c = 2.0 * LN_2.sqrt() / tau;
    let x = sqrt_c * t;
    let y = detuning.abs() / (2.0 * sqrt_c);
    let sigma = if detuning < 0.0 { -1.0 } else { 1.0 };
    let w = Complex64::new(sigma * y, x).w();
    let pre = Complex64::new(-x * x, 2.0 * sigma * x * y).exp();
    Complex64::new((-y * y).exp(), 0.0) - 0.5 * pre * w
}

/// Radial eigenfunctions of the window sampled once on a grid.
pub struct PacketBasis<'a> {
    amps: &'a PacketAmplitudes,
    grid: RadialGrid,
    /// samples[k][i] = R_k(r_i)
    samples: Vec<Vec<f64>>,
}

impl<'a> PacketBasis<'a> {
    pub fn new(amps: &'a PacketAmplitudes, grid: &RadialGrid) -> Self {
        let pts = grid.points();
        let samples = amps
            .states
            .par_iter()
            .map(|s| pts.iter().map(|&r| s.eval(r)).collect())
            .collect();
        Self {
            amps,
            grid: *grid,
            samples,
        }
    }

    /// f(r_i) = r_i² |Σ_n R_n(r_i) a_n φ_n(t)|², unnormalized.
    pub fn density(&self, t: f64, formation: bool) -> Vec<f64> {
        let a = self.amps;
        let coeffs: Vec<Complex64> = a
            .states
            .iter()
            .zip(&a.amps)
            .zip(&a.detunings)
            .map(|((s, &amp), &det)| amp * time_factor(s.energy, det, a.pulse.tau, t, formation))
            .collect();
        (0..self.grid.n_points)
            .into_par_iter()
            .map(|i| {
                let r = self.grid.point(i);
                let mut psi = Complex64::new(0.0, 0.0);
                for (c, col) in coeffs.iter().zip(&self.samples) {
                    psi += c * col[i];
                }
                r * r * psi.norm_sqr()
            })
            .collect()
    }
}

pub fn packet_density(amps: &PacketAmplitudes, grid: &RadialGrid, t: f64, formation: bool) -> Result<Vec<f64>> {
    if formation && t < 0.0 {
        return Err(Error::domain(format!("formation mode needs t >= 0, got {t}")));
    }
    Ok(PacketBasis::new(amps, grid).density(t, formation))
}

/// Densities at several times, scaled so that the first snapshot peaks at 1.
pub fn packet_density_series(
    amps: &PacketAmplitudes,
    grid: &RadialGrid,
    times: &[f64],
    formation: bool,
) -> Result<Vec<Vec<f64>>> {
    if formation && times.iter().any(|&t| t < 0.0) {
        return Err(Error::domain("formation mode needs t >= 0"));
    }
    let basis = PacketBasis::new(amps, grid);
    let mut out: Vec<Vec<f64>> = times.iter().map(|&t| basis.density(t, formation)).collect();
    if let Some(first) = out.first() {
        let peak = first.iter().cloned().fold(0.0, f64::max);
        if peak > 0.0 {
            for snap in &mut out {
                for v in snap.iter_mut() {
                    *v /= peak;
                }
            }
        }
    }
    Ok(out)
}

/// ∫ r f dr / ∫ f dr on a uniform grid.
pub fn centroid(grid: &RadialGrid, density: &[f64]) -> f64 {
    let (num, den) = grid
        .points()
        .iter()
        .zip(density)
        .fold((0.0, 0.0), |(a, b), (&r, &f)| (a + r * f, b + f));
    num / den
}

/// Location of the largest sample.
pub fn peak_location(grid: &RadialGrid, density: &[f64]) -> f64 {
    let (imax, _) = density
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    grid.point(imax)
}
