use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::decompose::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::sqdt::{RadialGrid, SampledWavefunction};

/// The window's eigenfunctions sampled once on a grid, for repeated
/// evaluation of Ψ(r, t) = Σ c_n R_n(r) e^{-iE_n t}.
pub struct EigenBasis<'a> {
    dec: &'a SpectralDecomposition,
    grid: RadialGrid,
    /// samples[k][i] = R_k(r_i)
    samples: Vec<Vec<f64>>,
}

impl<'a> EigenBasis<'a> {
    pub fn new(dec: &'a SpectralDecomposition, grid: &RadialGrid) -> Self {
        let pts = grid.points();
        let samples = dec
            .coefficients
            .par_iter()
            .map(|c| pts.iter().map(|&r| c.state.eval(r)).collect())
            .collect();
        Self {
            dec,
            grid: *grid,
            samples,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn evolve(&self, t: f64) -> SampledWavefunction {
        let coeffs: Vec<Complex64> = self
            .dec
            .coefficients
            .iter()
            .map(|c| c.c * Complex64::from_polar(1.0, -c.state.energy * t))
            .collect();
        let values = (0..self.grid.n_points)
            .into_par_iter()
            .map(|i| {
                let mut psi = Complex64::new(0.0, 0.0);
                for (c, col) in coeffs.iter().zip(&self.samples) {
                    psi += c * col[i];
                }
                psi
            })
            .collect();
        SampledWavefunction {
            grid: self.grid,
            values,
        }
    }
}

/// Ψ(r, t) sampled on `grid`.
pub fn evolve(dec: &SpectralDecomposition, t: f64, grid: &RadialGrid) -> SampledWavefunction {
    EigenBasis::new(dec, grid).evolve(t)
}

/// |⟨Ψ(t)|Ψ(0)⟩|² sampled at a list of times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutocorrelationTrace {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl AutocorrelationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// A(t) = |Σ |c_n|² e^{-iE_n t}|².
pub fn autocorrelation(dec: &SpectralDecomposition, times: &[f64]) -> AutocorrelationTrace {
    // shifting every energy by the same amount only changes a global phase
    let e_ref = dec.mean_energy() / dec.captured_norm;
    let terms: Vec<(f64, f64)> = dec
        .coefficients
        .iter()
        .map(|c| (c.c.norm_sqr(), c.state.energy - e_ref))
        .collect();
    let values = times
        .par_iter()
        .map(|&t| {
            let mut s = Complex64::new(0.0, 0.0);
            for &(w, e) in &terms {
                s += Complex64::from_polar(w, -e * t);
            }
            s.norm_sqr()
        })
        .collect();
    AutocorrelationTrace {
        times: times.to_vec(),
        values,
    }
}

/// t_start, t_start + dt, ... up to and including t_end (within dt/2).
pub fn uniform_times(t_start: f64, t_end: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !(t_end >= t_start) || !t_start.is_finite() || !t_end.is_finite() {
        return Err(Error::Config(format!(
            "time range {t_start}..{t_end} with step {dt} is not valid"
        )));
    }
    let n = ((t_end - t_start) / dt + 0.5).floor() as usize;
    Ok((0..=n).map(|i| t_start + dt * i as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sqdt::AtomModel;

    fn one(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn stationary_state_density_is_constant() {
        let h = AtomModel::hydrogen();
        let d = SpectralDecomposition::from_coefficients(&h, 1, &[(5, one(1.0))]).unwrap();
        let grid = RadialGrid::new(0.0, 120.0, 600).unwrap();
        let basis = EigenBasis::new(&d, &grid);
        let d0 = basis.evolve(0.0).radial_density();
        let d1 = basis.evolve(1234.5).radial_density();
        for (a, b) in d0.iter().zip(&d1) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn single_state_autocorrelation_is_constant() {
        let h = AtomModel::hydrogen();
        let c = Complex64::new(0.6, 0.3);
        let d = SpectralDecomposition::from_coefficients(&h, 1, &[(7, c)]).unwrap();
        let tr = autocorrelation(&d, &[0.0, 10.0, 1e5, 3.3e7]);
        for v in tr.values {
            assert!((v - c.norm_sqr().powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn two_state_beat() {
        let h = AtomModel::hydrogen();
        let s = 0.5f64.sqrt();
        let d = SpectralDecomposition::from_coefficients(&h, 1, &[(10, one(s)), (11, one(s))]).unwrap();
        let de = d.coefficients[1].state.energy - d.coefficients[0].state.energy;
        let period = 2.0 * std::f64::consts::PI / de;
        let tr = autocorrelation(&d, &[0.0, 0.5 * period, period]);
        assert!((tr.values[0] - 1.0).abs() < 1e-14);
        assert!(tr.values[1].abs() < 1e-14);
        assert!((tr.values[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_times_includes_end() {
        let t = uniform_times(0.0, 1.0, 0.25).unwrap();
        assert_eq!(t, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(uniform_times(0.0, 1.0, 0.0).is_err());
    }
}
