use serde::Serialize;

use super::decompose::SpectralDecomposition;
use super::dynamics::AutocorrelationTrace;
use crate::classical::kepler_period;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionalRevival {
    pub r: u32,
    /// t_rev / r
    pub t_r: f64,
    /// T_cl / r
    pub period_r: f64,
}

/// A revival at (2p/q) t_rev made of `packets` sub-packets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FractionalTime {
    pub p: u32,
    pub q: u32,
    pub packets: u32,
    pub t: f64,
}

/// Predicted time scales of an RSS, all in atomic units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RevivalSchedule {
    pub n_bar_star: f64,
    pub t_classical: f64,
    pub t_interference: f64,
    pub t_revival: f64,
    pub fractional: Vec<FractionalRevival>,
    pub delta_n: f64,
}

/// t_int = (n̄*/δn)T/3, t_rev = n̄* T/3, t_r = t_rev/r and T_r = T/r.
pub fn revival_schedule(n_bar_star: f64, delta_n: f64, r_max: u32) -> Result<RevivalSchedule> {
    if !(n_bar_star > 0.0) || !n_bar_star.is_finite() {
        return Err(Error::domain(format!("n̄* must be positive, got {n_bar_star}")));
    }
    if !(delta_n > 0.0) || !delta_n.is_finite() {
        return Err(Error::domain(format!("δn must be positive, got {delta_n}")));
    }
    let t_cl = kepler_period(n_bar_star);
    let t_rev = n_bar_star * t_cl / 3.0;
    let fractional = (1..=r_max)
        .map(|r| FractionalRevival {
            r,
            t_r: t_rev / r as f64,
            period_r: t_cl / r as f64,
        })
        .collect();
    Ok(RevivalSchedule {
        n_bar_star,
        t_classical: t_cl,
        t_interference: n_bar_star / delta_n * t_cl / 3.0,
        t_revival: t_rev,
        fractional,
        delta_n,
    })
}

impl RevivalSchedule {
    /// Every (2p/q) t_rev ≤ t_rev with p, q coprime and q ≤ q_max, ordered by
    /// time. The packet count is q for odd q and q/2 for even q.
    pub fn fractional_grid(&self, q_max: u32) -> Vec<FractionalTime> {
        let mut out = Vec::new();
        for q in 1..=q_max {
            for p in 1..=q / 2 {
                if gcd(p, q) != 1 {
                    continue;
                }
                out.push(FractionalTime {
                    p,
                    q,
                    packets: if q % 2 == 1 { q } else { q / 2 },
                    t: 2.0 * p as f64 / q as f64 * self.t_revival,
                });
            }
        }
        out.sort_by(|a, b| a.t.total_cmp(&b.t));
        out
    }

    pub fn fractional_time(&self, r: u32) -> Option<FractionalRevival> {
        self.fractional.iter().copied().find(|f| f.r == r)
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Spread of the decomposition in n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaN {
    /// |c_n|²-weighted standard deviation.
    pub rms: f64,
    /// 2√2 · rms, the full width at 1/e of a Gaussian weight profile.
    pub e_fold_width: f64,
}

pub fn delta_n(dec: &SpectralDecomposition) -> DeltaN {
    let rms = dec.rms_spread();
    DeltaN {
        rms,
        e_fold_width: 2.0 * std::f64::consts::SQRT_2 * rms,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    pub t: f64,
    pub value: f64,
}

/// Local maxima of a trace at or above `min_height`, refined by a parabola
/// through the three samples around each maximum. When two maxima are
/// closer than `min_separation` the lower one is dropped.
pub fn detect_peaks(trace: &AutocorrelationTrace, min_height: f64, min_separation: f64) -> Result<Vec<Peak>> {
    let (t, v) = (&trace.times, &trace.values);
    if t.is_empty() {
        return Err(Error::domain("cannot detect peaks in an empty trace"));
    }
    if t.len() != v.len() {
        return Err(Error::Config("trace times and values differ in length".into()));
    }
    let n = t.len();
    let mut candidates = Vec::new();
    for i in 0..n {
        let left = if i > 0 { v[i - 1] } else { f64::NEG_INFINITY };
        let right = if i + 1 < n { v[i + 1] } else { f64::NEG_INFINITY };
        // a trace still rising at its end has not reached its maximum
        if i + 1 == n && n > 1 {
            continue;
        }
        if !(v[i] >= min_height && v[i] >= left && v[i] > right) {
            continue;
        }
        if i == 0 {
            candidates.push(Peak { t: t[i], value: v[i] });
            continue;
        }
        candidates.push(refine(t[i - 1], t[i], t[i + 1], left, v[i], right));
    }

    let mut by_height: Vec<Peak> = candidates;
    by_height.sort_by(|a, b| b.value.total_cmp(&a.value));
    let mut kept: Vec<Peak> = Vec::new();
    for p in by_height {
        if kept.iter().all(|k| (k.t - p.t).abs() >= min_separation) {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(kept)
}

fn refine(t0: f64, t1: f64, t2: f64, y0: f64, y1: f64, y2: f64) -> Peak {
    let h = 0.5 * (t2 - t0);
    let curv = y0 - 2.0 * y1 + y2;
    if curv >= 0.0 || h <= 0.0 {
        return Peak { t: t1, value: y1 };
    }
    let shift = 0.5 * (y0 - y2) / curv;
    let shift = shift.clamp(-0.5, 0.5);
    Peak {
        t: t1 + shift * h,
        value: y1 - 0.25 * (y0 - y2) * shift,
    }
}

/// Spacings between consecutive peaks.
pub fn spacings(peaks: &[Peak]) -> Vec<f64> {
    peaks.windows(2).map(|w| w[1].t - w[0].t).collect()
}

/// The longest run of consecutive peaks, starting at the first one, whose
/// spacings all lie within `rel_tol` of `period`.
pub fn leading_chain(peaks: &[Peak], period: f64, rel_tol: f64) -> Vec<Peak> {
    let mut chain: Vec<Peak> = peaks.iter().take(1).copied().collect();
    for w in peaks.windows(2) {
        if ((w[1].t - w[0].t) / period - 1.0).abs() > rel_tol {
            break;
        }
        chain.push(w[1]);
    }
    chain
}

/// Time of the first classical-period maximum of A(t) below `threshold`.
///
/// The maximum near k·period is taken over [k − ¼, k + ¼]·period for
/// k = 1, 2, ...; returns `None` if every such maximum inside the trace
/// stays at or above the threshold.
pub fn empirical_collapse_time(trace: &AutocorrelationTrace, period: f64, threshold: f64) -> Option<f64> {
    let t_end = *trace.times.last()?;
    let mut k = 1.0;
    while (k + 0.25) * period <= t_end {
        let (lo, hi) = ((k - 0.25) * period, (k + 0.25) * period);
        let best = trace
            .times
            .iter()
            .zip(&trace.values)
            .filter(|(&t, _)| t >= lo && t <= hi)
            .max_by(|a, b| a.1.total_cmp(b.1));
        if let Some((&t, &v)) = best {
            if v < threshold {
                return Some(t);
            }
        }
        k += 1.0;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::au_to_ns;

    fn trace(f: impl Fn(f64) -> f64, t_end: f64, dt: f64) -> AutocorrelationTrace {
        let times = super::super::dynamics::uniform_times(0.0, t_end, dt).unwrap();
        let values = times.iter().map(|&t| f(t)).collect();
        AutocorrelationTrace { times, values }
    }

    #[test]
    fn schedule_relations_are_exact() {
        let s = revival_schedule(85.0, 7.0, 4).unwrap();
        for f in &s.fractional {
            assert_eq!(f.t_r, s.t_revival / f.r as f64);
            assert_eq!(f.period_r, s.t_classical / f.r as f64);
        }
        assert!(s.t_interference < s.t_revival);
        assert!((s.t_interference / s.t_classical - 85.0 / 21.0).abs() < 1e-12);
        assert!((au_to_ns(s.t_revival) - 2.6445).abs() < 1e-3);
        assert!((au_to_ns(s.fractional_time(4).unwrap().t_r) - 0.65).abs() < 0.02);
        assert!(revival_schedule(0.0, 7.0, 4).is_err());
        assert!(revival_schedule(85.0, -1.0, 4).is_err());
    }

    #[test]
    fn fractional_grid_contains_the_singled_out_times() {
        let s = revival_schedule(50.0, 5.0, 4).unwrap();
        let g = s.fractional_grid(8);
        for r in 1..=4u32 {
            let t = s.t_revival / r as f64;
            let hit = g.iter().find(|f| (f.t - t).abs() < 1e-9 * t).unwrap();
            assert_eq!(hit.packets, r);
        }
        assert!(g.iter().all(|f| f.t <= s.t_revival * (1.0 + 1e-12)));
    }

    #[test]
    fn cosine_peaks_are_one_period_apart() {
        let period = 7.3;
        let tr = trace(|t| 0.5 + 0.5 * (2.0 * std::f64::consts::PI * t / period).cos(), 50.0, 0.01);
        let peaks = detect_peaks(&tr, 0.5, 0.5 * period).unwrap();
        assert_eq!(peaks[0].t, 0.0);
        assert_eq!(peaks.len(), 7);
        for s in spacings(&peaks) {
            assert!((s - period).abs() < 0.01, "{s}");
        }
        assert_eq!(leading_chain(&peaks, period, 0.01).len(), 7);
    }

    #[test]
    fn separation_keeps_the_higher_peak() {
        let tr = AutocorrelationTrace {
            times: vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            values: vec![0.0, 0.6, 0.1, 0.9, 0.2, 0.0, 0.0],
        };
        let p = detect_peaks(&tr, 0.3, 3.0).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0].t - 3.0).abs() < 0.5);
        assert!(detect_peaks(&AutocorrelationTrace { times: vec![], values: vec![] }, 0.1, 1.0).is_err());
    }

    #[test]
    fn collapse_time_of_a_decaying_cosine() {
        let period = 10.0;
        let f = |t: f64| (-t / 25.0).exp() * (0.5 + 0.5 * (2.0 * std::f64::consts::PI * t / period).cos());
        let tr = trace(f, 200.0, 0.05);
        // e^{-k·10/25} < 0.1 first at k = 6
        let t = empirical_collapse_time(&tr, period, 0.1).unwrap();
        assert!((t - 60.0).abs() < 2.5, "{t}");
        assert_eq!(empirical_collapse_time(&tr, period, 1e-9), None);
    }
}
