use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::level::RadialEigenstate;
use crate::error::{Error, Result};

/// Uniform radial grid r_i = r_min + i·dr, i = 0..n_points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_min >= 0.0) || !r_max.is_finite() || !(r_min < r_max) {
            return Err(Error::Config(format!(
                "grid needs 0 <= r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        if n_points < 2 {
            return Err(Error::Config(format!("grid needs at least 2 points, got {n_points}")));
        }
        Ok(Self {
            r_min,
            r_max,
            n_points,
        })
    }

    /// Grid on [0, r_max] with the given spacing (rounded to fit exactly).
    pub fn with_spacing(r_max: f64, dr: f64) -> Result<Self> {
        if !(dr > 0.0) {
            return Err(Error::Config(format!("grid spacing must be positive, got {dr}")));
        }
        let cells = (r_max / dr).round().max(1.0) as usize;
        Self::new(0.0, r_max, cells + 1)
    }

    pub fn spacing(&self) -> f64 {
        (self.r_max - self.r_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.r_max
        } else {
            self.r_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }

    /// Index of the grid point nearest to r (clamped to the grid).
    pub fn nearest_index(&self, r: f64) -> usize {
        let x = ((r - self.r_min) / self.spacing()).round();
        x.clamp(0.0, (self.n_points - 1) as f64) as usize
    }
}

/// Complex samples ψ(r_i) of a radial wavefunction on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction {
    pub grid: RadialGrid,
    pub values: Vec<Complex64>,
}

impl SampledWavefunction {
    pub fn new(grid: RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::Config(format!(
                "{} samples for a grid of {} points",
                values.len(),
                grid.n_points
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F>(grid: RadialGrid, f: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        let values = (0..grid.n_points)
            .into_par_iter()
            .map(|i| f(grid.point(i)))
            .collect();
        Self { grid, values }
    }

    /// |ψ(r_i)|² r_i², the radial probability density on the grid.
    pub fn radial_density(&self) -> Vec<f64> {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let r = self.grid.point(i);
                v.norm_sqr() * r * r
            })
            .collect()
    }

    /// Σ |ψ|² r² Δr with trapezoid end weights.
    pub fn norm_squared(&self) -> f64 {
        let dens = self.radial_density();
        trapezoid(&dens, self.grid.spacing())
    }

    /// ⟨self|other⟩ = Σ conj(ψ_a) ψ_b r² Δr (trapezoid).
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let dr = self.grid.spacing();
        let n = self.values.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let r = self.grid.point(i);
            let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
            acc += self.values[i].conj() * other.values[i] * (w * r * r);
        }
        Ok(acc * dr)
    }

    /// L² distance ‖ψ_a − ψ_b‖ with the radial measure r² dr.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let dr = self.grid.spacing();
        let dens: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| {
                let r = self.grid.point(i);
                (a - b).norm_sqr() * r * r
            })
            .collect();
        Ok(trapezoid(&dens, dr).sqrt())
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Config("wavefunctions live on different grids".into()));
        }
        Ok(())
    }
}

pub(crate) fn trapezoid(y: &[f64], dx: f64) -> f64 {
    match y.len() {
        0 | 1 => 0.0,
        n => (y.iter().sum::<f64>() - 0.5 * (y[0] + y[n - 1])) * dx,
    }
}

/// Real samples of R_{n*l*} on the grid.
pub fn sample(state: &RadialEigenstate, grid: &RadialGrid) -> SampledWavefunction {
    SampledWavefunction::from_fn(*grid, |r| Complex64::new(state.eval(r), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::new(1.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(-1.0, 1.0, 10).is_err());
        assert!(RadialGrid::new(0.0, 1.0, 1).is_err());
        let g = RadialGrid::new(0.0, 20.0, 2001).unwrap();
        assert!((g.spacing() - 0.01).abs() < 1e-15);
        assert_eq!(g.point(2000), 20.0);
        let pts = g.points();
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(g.nearest_index(5.004), 500);
    }

    #[test]
    fn ground_state_samples() {
        let g = RadialGrid::new(0.0, 20.0, 2001).unwrap();
        let s = sample(&RadialEigenstate::hydrogen(1, 0).unwrap(), &g);
        let re: Vec<f64> = s.values.iter().map(|v| v.re).collect();
        assert!(re.windows(2).all(|w| w[1] < w[0]));
        assert!((s.norm_squared() - 1.0).abs() < 1e-4);
        let fine = RadialGrid::new(0.0, 40.0, 400_001).unwrap();
        let s = sample(&RadialEigenstate::hydrogen(1, 0).unwrap(), &fine);
        assert!((s.norm_squared() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn grid_norm_of_rydberg_state() {
        let st = RadialEigenstate::hydrogen(85, 1).unwrap();
        let g = RadialGrid::new(0.0, 4.0 * 85.0 * 85.0, 100_001).unwrap();
        let s = sample(&st, &g);
        assert!((s.norm_squared() - 1.0).abs() < 1e-6);
        let other = sample(&RadialEigenstate::hydrogen(84, 1).unwrap(), &g);
        assert!(s.inner(&other).unwrap().norm() < 1e-6);
        assert!((s.l2_distance(&other).unwrap() - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn outermost_antinode_of_n85() {
        // the last maximum of |R| sits at 13960.4 a.u. (r²R² peaks at 13975.4)
        let st = RadialEigenstate::hydrogen(85, 1).unwrap();
        let g = RadialGrid::new(12_000.0, 16_000.0, 40_001).unwrap();
        let s = sample(&st, &g);
        let (imax, _) = s
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.re.abs()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!((g.point(imax) - 13_960.41).abs() <= g.spacing());
        let dens = s.radial_density();
        let (jmax, _) = dens
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc });
        assert!((g.point(jmax) - 13_975.44).abs() <= g.spacing());
    }

    #[test]
    fn radial_hamiltonian_eigenvalue() {
        // -u''/2 + [l*(l*+1)/2r² - 1/r] u = E u for u = r R, with a fourth-order stencil
        for st in [
            RadialEigenstate::hydrogen(6, 1).unwrap(),
            RadialEigenstate::with_defect(12, 1, 2.65, 3).unwrap(),
        ] {
            let ls = st.l_star;
            let u = |r: f64| r * st.eval(r);
            let scale = (1..2000)
                .map(|i| u(i as f64 * 0.25).abs())
                .fold(0.0, f64::max);
            for h in [0.02, 0.01] {
                let mut worst: f64 = 0.0;
                for i in 1..60 {
                    let r = 1.0 + i as f64 * 3.7;
                    let d2 = (-u(r + 2.0 * h) + 16.0 * u(r + h) - 30.0 * u(r) + 16.0 * u(r - h)
                        - u(r - 2.0 * h))
                        / (12.0 * h * h);
                    let hu = -0.5 * d2 + (0.5 * ls * (ls + 1.0) / (r * r) - 1.0 / r) * u(r);
                    worst = worst.max((hu - st.energy * u(r)).abs());
                }
                assert!(worst / scale < 1e-7, "h={h}: {worst:e}");
            }
        }
    }
}
