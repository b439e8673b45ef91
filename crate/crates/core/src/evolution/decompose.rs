use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_panels, QuadOptions};
use crate::rss::RssParams;
use crate::specfun::ddouble::{ComplexDd, DoubleDouble};
use crate::specfun::{log_gamma_unchecked, terminating_2f1_best_dd, HyperArgDd, SeriesForm};
use crate::sqdt::{AtomModel, RadialEigenstate};

/// Default truncation half-width around n̄.
pub const DEFAULT_HALF_WIDTH: u32 = 15;
/// Edge |c_n|² must fall below this fraction of the largest |c_n|².
pub const EDGE_FRACTION: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CoefficientSource {
    ClosedForm { form: SeriesForm, condition: f64 },
    /// The series lost significance and the overlap was integrated instead.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficient {
    pub state: RadialEigenstate,
    pub c: Complex64,
    pub source: CoefficientSource,
}

/// Eigenbasis expansion of a radial squeezed state in one l channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralDecomposition {
    pub atom: AtomModel,
    pub l: u32,
    pub l_star: f64,
    pub window: (u32, u32),
    /// Ordered by n.
    pub coefficients: Vec<Coefficient>,
    /// Σ |c_n|² over the window.
    pub captured_norm: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct DecomposeOptions {
    pub edge_fraction: f64,
    /// Largest distance of either window edge from the centre of the
    /// requested window before widening gives up.
    pub max_half_width: u32,
    pub widen_step: u32,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            edge_fraction: EDGE_FRACTION,
            max_half_width: 60,
            widen_step: 5,
        }
    }
}

/// n̄ ± 15, clipped to the lowest bound level of the channel.
pub fn default_window(atom: &AtomModel, n_bar: u32, l: u32) -> Result<(u32, u32)> {
    let lo = lowest_n(atom, l)?.max(n_bar.saturating_sub(DEFAULT_HALF_WIDTH));
    Ok((lo, n_bar + DEFAULT_HALF_WIDTH))
}

pub fn decompose(
    params: &RssParams,
    atom: &AtomModel,
    l: u32,
    window: (u32, u32),
) -> Result<SpectralDecomposition> {
    decompose_with(params, atom, l, window, DecomposeOptions::default())
}

pub fn decompose_with(
    params: &RssParams,
    atom: &AtomModel,
    l: u32,
    window: (u32, u32),
    opts: DecomposeOptions,
) -> Result<SpectralDecomposition> {
    let n_min = lowest_n(atom, l)?;
    let (req_lo, req_hi) = window;
    if req_hi < req_lo {
        return Err(Error::Config(format!("empty window {req_lo}..={req_hi}")));
    }
    let mut lo = req_lo.max(n_min);
    let mut hi = req_hi.max(lo);
    let centre = (req_lo + req_hi) / 2;
    let cap_lo = centre.saturating_sub(opts.max_half_width).max(n_min);
    let cap_hi = centre + opts.max_half_width;

    let mut cache: BTreeMap<u32, Coefficient> = BTreeMap::new();
    loop {
        let missing: Vec<u32> = (lo..=hi).filter(|n| !cache.contains_key(n)).collect();
        let fresh: Vec<Result<Coefficient>> = missing
            .par_iter()
            .map(|&n| coefficient(params, &RadialEigenstate::new(atom, n, l)?))
            .collect();
        for c in fresh {
            let c = c?;
            cache.insert(c.state.n, c);
        }

        let weight = |n: u32| cache[&n].c.norm_sqr();
        let peak = (lo..=hi).map(weight).fold(0.0, f64::max);
        let low_ok = lo == n_min || weight(lo) <= opts.edge_fraction * peak;
        let high_ok = weight(hi) <= opts.edge_fraction * peak;
        if low_ok && high_ok {
            break;
        }
        let can_lower = !low_ok && lo > cap_lo;
        let can_raise = !high_ok && hi < cap_hi;
        if !can_lower && !can_raise {
            return Err(Error::Numerical(format!(
                "window {lo}..={hi} still has edge weight above {:e} of the peak \
                 (|c|² = {:.3e} at n={lo}, {:.3e} at n={hi}, peak {:.3e}); widening is capped at {cap_lo}..={cap_hi}",
                opts.edge_fraction,
                weight(lo),
                weight(hi),
                peak
            )));
        }
        if can_lower {
            lo = lo.saturating_sub(opts.widen_step).max(cap_lo);
        }
        if can_raise {
            hi = (hi + opts.widen_step).min(cap_hi);
        }
    }

    let coefficients: Vec<Coefficient> = (lo..=hi).map(|n| cache[&n]).collect();
    let mut warnings = Vec::new();
    if (lo, hi) != (req_lo, req_hi) {
        warnings.push(format!("window widened from {req_lo}..={req_hi} to {lo}..={hi}"));
    }
    let marked: Vec<u32> = coefficients
        .iter()
        .filter(|c| c.source == CoefficientSource::Quadrature)
        .map(|c| c.state.n)
        .collect();
    if !marked.is_empty() {
        warnings.push(format!("closed form lost significance, quadrature used for n = {marked:?}"));
    }
    let l_star = atom.channel(l)?.l_star();
    Ok(SpectralDecomposition::assemble(atom.clone(), l, l_star, (lo, hi), coefficients, warnings))
}

fn lowest_n(atom: &AtomModel, l: u32) -> Result<u32> {
    let ch = atom.channel(l)?;
    let mut n = l + 1 + ch.susy_int;
    while RadialEigenstate::from_channel(n, ch).is_err() {
        n += 1;
        if n > l + 1 + ch.susy_int + 16 {
            return Err(Error::Config(format!("channel l={l} of {} has no bound level", atom.name)));
        }
    }
    Ok(n)
}

/// c_n from the closed form, falling back to quadrature when the
/// hypergeometric sum loses significance.
pub fn coefficient(params: &RssParams, state: &RadialEigenstate) -> Result<Coefficient> {
    match closed_form_coefficient(params, state) {
        Ok((c, form, condition, false)) if c.re.is_finite() && c.im.is_finite() => Ok(Coefficient {
            state: *state,
            c,
            source: CoefficientSource::ClosedForm { form, condition },
        }),
        _ => Ok(Coefficient {
            state: *state,
            c: quadrature_coefficient(params, state)?,
            source: CoefficientSource::Quadrature,
        }),
    }
}

/// ⟨R_{n*l*}|ψ⟩ in closed form.
///
/// With β = γ₀ + iγ₁, b = α + l* + 3 and k the Laguerre degree,
///
/// c_n = |N| 2^{l*+1} n*^{α+1} Γ(b) / Γ(2l*+2) · sqrt(Γ(k+2l*+2)/Γ(k+1))
///       · (n*β + 1)^{-b} · ₂F₁(-k, b; 2l*+2; 2/(n*β+1)).
///
/// Returns the value, the series form used, its cancellation ratio and
/// the significance-loss flag.
pub fn closed_form_coefficient(
    params: &RssParams,
    state: &RadialEigenstate,
) -> Result<(Complex64, SeriesForm, f64, bool)> {
    let a = params.alpha;
    let ls = state.l_star;
    let ns = state.n_star;
    let k = state.degree as f64;
    let b = DoubleDouble::new(a) + DoubleDouble::new(ls) + DoubleDouble::new(3.0);
    let c = DoubleDouble::new(2.0) * DoubleDouble::new(ls) + DoubleDouble::new(2.0);

    let nd = DoubleDouble::new(ns);
    let nbeta = ComplexDd::new(nd * DoubleDouble::new(params.gamma0), nd * DoubleDouble::new(params.gamma1));
    let one = ComplexDd::ONE;
    let w = nbeta + one;
    let arg = HyperArgDd {
        z: ComplexDd::new(DoubleDouble::new(2.0), DoubleDouble::ZERO) / w,
        one_minus_z: (nbeta - one) / w,
    };
    let (series, form) = terminating_2f1_best_dd(state.degree, b, c, arg)?;

    let bf = b.to_f64();
    let ln_pref = 0.5 * params.ln_norm_squared()
        + (ls + 1.0) * std::f64::consts::LN_2
        + (a + 1.0) * ns.ln()
        + log_gamma_unchecked(bf)
        - log_gamma_unchecked(2.0 * ls + 2.0)
        + 0.5 * (log_gamma_unchecked(k + 2.0 * ls + 2.0) - log_gamma_unchecked(k + 1.0));
    let ln_w = w.to_c64().ln();
    let ln_total = Complex64::new(ln_pref + series.magnitude_scale, 0.0) - ln_w * bf;
    Ok((
        series.value * ln_total.exp(),
        form,
        series.condition,
        series.significance_loss,
    ))
}

/// ⟨R_{n*l*}|ψ⟩ by adaptive quadrature over the overlap of the two supports.
pub fn quadrature_coefficient(params: &RssParams, state: &RadialEigenstate) -> Result<Complex64> {
    quadrature_coefficient_with(params, state, QuadOptions::default())
}

pub fn quadrature_coefficient_with(
    params: &RssParams,
    state: &RadialEigenstate,
    opts: QuadOptions,
) -> Result<Complex64> {
    let (s_lo, s_hi) = params.support();
    let hi = s_hi.min(state.extent());
    let lo = s_lo.min(hi);
    if hi <= lo {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let panels = 2 * state.degree as usize + 16;
    let (a, b) = (lo.sqrt(), hi.sqrt());
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| {
            let s = a + (b - a) * i as f64 / panels as f64;
            s * s
        })
        .collect();
    let res = integrate_panels(
        |r: f64| {
            if r == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            params.psi(r) * (state.eval(r) * r * r)
        },
        &breaks,
        opts,
    )
    .map_err(|e| Error::Numerical(format!("c_n quadrature for n={}: {e}", state.n)))?;
    Ok(res.value)
}

impl SpectralDecomposition {
    fn assemble(
        atom: AtomModel,
        l: u32,
        l_star: f64,
        window: (u32, u32),
        coefficients: Vec<Coefficient>,
        warnings: Vec<String>,
    ) -> Self {
        let captured_norm = coefficients.iter().map(|c| c.c.norm_sqr()).sum();
        Self {
            atom,
            l,
            l_star,
            window,
            coefficients,
            captured_norm,
            warnings,
        }
    }

    /// A decomposition with explicitly given coefficients.
    pub fn from_coefficients(atom: &AtomModel, l: u32, coeffs: &[(u32, Complex64)]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Config("no coefficients given".into()));
        }
        let mut sorted = coeffs.to_vec();
        sorted.sort_by_key(|&(n, _)| n);
        let coefficients = sorted
            .iter()
            .map(|&(n, c)| {
                Ok(Coefficient {
                    state: RadialEigenstate::new(atom, n, l)?,
                    c,
                    source: CoefficientSource::Quadrature,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let window = (sorted[0].0, sorted[sorted.len() - 1].0);
        let l_star = atom.channel(l)?.l_star();
        Ok(Self::assemble(atom.clone(), l, l_star, window, coefficients, Vec::new()))
    }

    pub fn coefficient(&self, n: u32) -> Option<Complex64> {
        self.coefficients.iter().find(|c| c.state.n == n).map(|c| c.c)
    }

    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.c.norm_sqr()).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.state.energy).collect()
    }

    /// Σ |c_n|² E_{n*}.
    pub fn mean_energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.c.norm_sqr() * c.state.energy).sum()
    }

    /// |c_n|²-weighted mean of n*.
    pub fn mean_n_star(&self) -> f64 {
        let s: f64 = self.coefficients.iter().map(|c| c.c.norm_sqr() * c.state.n_star).sum();
        s / self.captured_norm
    }

    /// |c_n|²-weighted root-mean-square spread of n.
    pub fn rms_spread(&self) -> f64 {
        let mean = self.mean_n_star();
        let s: f64 = self
            .coefficients
            .iter()
            .map(|c| c.c.norm_sqr() * (c.state.n_star - mean).powi(2))
            .sum();
        (s / self.captured_norm).sqrt()
    }

    /// The n with the largest |c_n|².
    pub fn peak_n(&self) -> u32 {
        self.coefficients
            .iter()
            .max_by(|a, b| a.c.norm_sqr().total_cmp(&b.c.norm_sqr()))
            .map(|c| c.state.n)
            .unwrap_or(self.window.0)
    }

    pub fn quadrature_count(&self) -> usize {
        self.coefficients
            .iter()
            .filter(|c| c.source == CoefficientSource::Quadrature)
            .count()
    }
}
