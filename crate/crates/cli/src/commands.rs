use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::{json, Value};

use rydberg_core::classical::{kepler_period, oscillator_variables, radial_period_by_quadrature, OrbitParams};
use rydberg_core::evolution::{
    autocorrelation, decompose, default_window, delta_n, detect_peaks, empirical_collapse_time,
    revival_schedule, uniform_times, CnPropagator, EigenBasis, SpectralDecomposition, Stencil,
};
use rydberg_core::perturbation::{
    centroid, packet_amplitudes, packet_amplitudes_auto, packet_density_series, peak_location, PulseSpec,
};
use rydberg_core::rss::{expectations, initialize_report, uncertainties, RssParams};
use rydberg_core::sqdt::{sample, AtomModel, AtomTable, RadialEigenstate, RadialGrid};
use rydberg_core::units::{au_to_ns, au_to_ps};

use crate::error::CliError;
use crate::output::{num, Report, Table};
use crate::scenario::{Format, Scenario, TimeUnits};

pub const DEFAULT_POINTS: usize = 4001;
/// Crank–Nicolson defaults: Δr = 0.1 a.u. and dt = T/200000.
pub const CN_DR: f64 = 0.1;
pub const CN_STEPS_PER_PERIOD: f64 = 2e5;

pub struct Ctx {
    pub sc: Scenario,
    pub atom: AtomModel,
    /// The level n̄ in channel l.
    pub centre: RadialEigenstate,
    pub t_cl: f64,
}

impl Ctx {
    pub fn new(sc: Scenario) -> Result<Self, CliError> {
        let mut table = AtomTable::builtin();
        if let Some(path) = &sc.atoms_file {
            table.merge(AtomTable::load(path)?);
        }
        let atom = table.get(&sc.atom)?;
        let centre = RadialEigenstate::new(&atom, sc.n_bar, sc.l)?;
        let t_cl = kepler_period(centre.n_star);
        Ok(Self { sc, atom, centre, t_cl })
    }

    fn units(&self) -> TimeUnits {
        TimeUnits { t_classical: self.t_cl }
    }

    fn times(&self, default: &str) -> Result<Vec<f64>, CliError> {
        self.units().parse_list(self.sc.times.as_deref().unwrap_or(default))
    }

    fn default_r_max(&self) -> f64 {
        4.0 * self.centre.n_star * self.centre.n_star
    }

    fn grid(&self, r_min: f64, default_points: usize, default_dr: Option<f64>) -> Result<RadialGrid, CliError> {
        let r_max = self.sc.r_max.unwrap_or_else(|| self.default_r_max());
        let points = match (self.sc.points, self.sc.dr.or(default_dr)) {
            (Some(p), _) => p,
            (None, Some(dr)) => {
                if !(dr > 0.0) {
                    return Err(CliError::Config(format!("dr must be positive, got {dr}")));
                }
                ((r_max - r_min) / dr).round() as usize + 1
            }
            (None, None) => default_points,
        };
        Ok(RadialGrid::new(r_min, r_max, points)?)
    }

    fn rss(&self) -> Result<RssParams, CliError> {
        Ok(initialize_report(&self.atom, self.sc.n_bar, self.sc.l)?.params)
    }

    fn decomposition(&self) -> Result<SpectralDecomposition, CliError> {
        let params = self.rss()?;
        let window = match self.sc.window {
            Some(w) => w,
            None => default_window(&self.atom, self.sc.n_bar, self.sc.l)?,
        };
        Ok(decompose(&params, &self.atom, self.sc.l, window)?)
    }

    fn put_level(&self, rep: &mut Report) {
        rep.put("atom", &self.atom.name);
        rep.put("n_bar", self.sc.n_bar);
        rep.put("l", self.sc.l);
        rep.put("n_bar_star", self.centre.n_star);
        rep.put("l_star", self.centre.l_star);
    }
}

pub fn default_format(command: &str) -> Format {
    match command {
        "rss-init" | "revivals" | "classical" => Format::Json,
        _ => Format::Csv,
    }
}

pub fn run(command: &str, ctx: &Ctx) -> Result<Report, CliError> {
    match command {
        "eigenstate" => eigenstate(ctx),
        "classical" => classical(ctx),
        "perturb" => perturb(ctx),
        "rss-init" => rss_init(ctx),
        "rss-density" => rss_density(ctx),
        "decompose" => decompose_cmd(ctx),
        "evolve" => evolve_cmd(ctx),
        "autocorr" => autocorr(ctx),
        "revivals" => revivals(ctx),
        "crosscheck" => crosscheck(ctx),
        other => Err(CliError::Config(format!("unknown subcommand '{other}'"))),
    }
}

fn eigenstate(ctx: &Ctx) -> Result<Report, CliError> {
    let n = ctx.sc.n.unwrap_or(ctx.sc.n_bar);
    let state = RadialEigenstate::new(&ctx.atom, n, ctx.sc.l)?;
    let grid = ctx.grid(ctx.sc.r_min, DEFAULT_POINTS, None)?;
    let psi = sample(&state, &grid);
    let mut t = Table::new(["r_au", "R_au", "r2R2_per_au"]);
    for (i, v) in psi.values.iter().enumerate() {
        let r = grid.point(i);
        t.push(vec![num(r), num(v.re), num(r * r * v.re * v.re)]);
    }
    let mut rep = Report::default();
    rep.put("atom", &ctx.atom.name);
    rep.put("n", n);
    rep.put("l", ctx.sc.l);
    rep.put("n_star", state.n_star);
    rep.put("l_star", state.l_star);
    rep.put("laguerre_degree", state.degree);
    rep.put("energy_hartree", state.energy);
    rep.put("norm_on_grid", psi.norm_squared());
    rep.table = Some(t);
    Ok(rep)
}

fn classical(ctx: &Ctx) -> Result<Report, CliError> {
    let c = &ctx.centre;
    let orbit = OrbitParams::new(c.n_star, c.l_star, ctx.sc.l as f64)?;
    let (r1, r2) = orbit.apsides();
    let mut rep = Report::default();
    ctx.put_level(&mut rep);
    rep.put("energy_hartree", orbit.energy);
    rep.put("eccentricity", orbit.eccentricity);
    rep.put("f_ratio", orbit.f_ratio);
    rep.put("r_inner_au", r1);
    rep.put("r_outer_au", r2);
    rep.put("period_au", orbit.period());
    rep.put("period_ps", au_to_ps(orbit.period()));
    rep.put("period_quadrature_au", radial_period_by_quadrature(&orbit)?);
    rep.put("precession_per_orbit_rad", orbit.precession_per_orbit());
    rep.put("oscillator_energy", orbit.oscillator_energy());

    let sweep = 2.0 * PI / orbit.f_ratio;
    let samples = 720;
    let mut t = Table::new(["theta_rad", "r_au", "R_per_au", "P_au"]);
    for k in 0..=samples {
        let th = orbit.theta0 + sweep * k as f64 / samples as f64;
        let (big_r, big_p) = oscillator_variables(&orbit, th);
        t.push(vec![num(th), num(orbit.radius_at(th)), num(big_r), num(big_p)]);
    }
    rep.table = Some(t);
    Ok(rep)
}

fn perturb(ctx: &Ctx) -> Result<Report, CliError> {
    let g = ctx.sc.ground;
    let ground = RadialEigenstate::with_defect(g.n, g.l, g.delta, g.susy_int)?;
    let pulse = PulseSpec::tuned(ctx.sc.tau_ps, &ctx.centre, &ground)?;
    let amps = match ctx.sc.window {
        Some(w) => packet_amplitudes(&ctx.atom, &ground, &pulse, w)?,
        None => packet_amplitudes_auto(&ctx.atom, &ground, &pulse)?,
    };
    let times = ctx.times("1/9T,2/9T,3/9T,4/9T")?;
    let grid = ctx.grid(ctx.sc.r_min, DEFAULT_POINTS, None)?;
    let series = packet_density_series(&amps, &grid, &times, ctx.sc.formation)?;

    let mut cols = vec!["r_au".to_string()];
    cols.extend(times.iter().map(|t| format!("f_t{:.6}ps", au_to_ps(*t))));
    let mut table = Table::new(cols);
    for i in 0..grid.n_points {
        let mut row = vec![num(grid.point(i))];
        row.extend(series.iter().map(|s| num(s[i])));
        table.push(row);
    }

    let mut rep = Report::default();
    ctx.put_level(&mut rep);
    rep.put("tau_ps", ctx.sc.tau_ps);
    rep.put("window", amps.window);
    rep.put("formation", ctx.sc.formation);
    rep.put("edge_ratio", amps.edge_ratio());
    rep.put("validity_horizon_ps", au_to_ps(amps.validity_horizon()));
    let snaps: Vec<Value> = times
        .iter()
        .zip(&series)
        .map(|(&t, s)| {
            json!({
                "t_ps": num(au_to_ps(t)),
                "t_over_T": num(t / ctx.t_cl),
                "centroid_au": num(centroid(&grid, s)),
                "peak_au": num(peak_location(&grid, s)),
            })
        })
        .collect();
    rep.put("snapshots", snaps);
    let coeffs: Vec<Value> = amps
        .states
        .iter()
        .zip(&amps.amps)
        .map(|(s, a)| json!({"n": s.n, "re": num(a.re), "im": num(a.im)}))
        .collect();
    rep.put("amplitudes", coeffs);
    rep.warnings.extend(amps.warnings.iter().cloned());
    rep.table = Some(table);
    Ok(rep)
}

fn rss_init(ctx: &Ctx) -> Result<Report, CliError> {
    let init = initialize_report(&ctx.atom, ctx.sc.n_bar, ctx.sc.l)?;
    let u = uncertainties(&init.params);
    let ex = expectations(&init.params, init.l_star);
    let mut rep = Report::default();
    ctx.put_level(&mut rep);
    rep.put("alpha", init.params.alpha);
    rep.put("gamma0", init.params.gamma0);
    rep.put("gamma1", init.params.gamma1);
    rep.put("delta_r", u.dr);
    rep.put("delta_p", u.dp);
    rep.put("product", u.product);
    rep.put("r0_au", init.params.mode());
    rep.put("c0_per_au2", init.params.envelope_curvature());
    rep.put("r_out_au", init.r_out);
    rep.put("target_energy_hartree", init.target_energy);
    rep.put("mean_r_au", ex.r);
    rep.put("mean_energy_hartree", ex.h);
    rep.put("residual_r", init.residual_r);
    rep.put("residual_h", init.residual_h);
    rep.put("iterations", init.iterations);
    Ok(rep)
}

fn rss_density(ctx: &Ctx) -> Result<Report, CliError> {
    let p = ctx.rss()?;
    let grid = ctx.grid(ctx.sc.r_min, DEFAULT_POINTS, None)?;
    let mut t = Table::new(["r_au", "r2psi2_per_au"]);
    for i in 0..grid.n_points {
        let r = grid.point(i);
        t.push(vec![num(r), num(p.radial_density(r))]);
    }
    let mut rep = Report::default();
    ctx.put_level(&mut rep);
    rep.put("rss", p);
    rep.table = Some(t);
    Ok(rep)
}

fn decompose_cmd(ctx: &Ctx) -> Result<Report, CliError> {
    let d = ctx.decomposition()?;
    let mut t = Table::new(["n", "n_star", "energy_hartree", "re_c", "im_c", "abs2_c", "source"]);
    for c in &d.coefficients {
        let source = match c.source {
            rydberg_core::evolution::CoefficientSource::Quadrature => "quadrature",
            _ => "closed-form",
        };
        t.push(vec![
            json!(c.state.n),
            num(c.state.n_star),
            num(c.state.energy),
            num(c.c.re),
            num(c.c.im),
            num(c.c.norm_sqr()),
            json!(source),
        ]);
    }
    let nbs = ctx.centre.n_star;
    let mut rep = Report::default();
    ctx.put_level(&mut rep);
    rep.put("window", d.window);
    rep.put("captured_norm", d.captured_norm);
    rep.put("mean_energy_hartree", d.mean_energy());
    rep.put("target_energy_hartree", -0.5 / (nbs * nbs));
    rep.put("delta_n", delta_n(&d));
    rep.put("quadrature_coefficients", d.quadrature_count());
    rep.warnings.extend(d.warnings.iter().cloned());
    rep.table = Some(t);
    Ok(rep)
}

fn evolve_cmd(ctx: &Ctx) -> Result<Report, CliError> {
    let d = ctx.decomposition()?;
    let times = ctx.times("0,1/2T,1T")?;
    let grid = ctx.grid(ctx.sc.r_min, DEFAULT_POINTS, None)?;
    let basis = EigenBasis::new(&d, &grid);
    let densities: Vec<Vec<f64>> = times.iter().map(|&t| basis.evolve(t).radial_density()).collect();
    let mut cols = vec!["r_au".to_string()];
    cols.extend(times.iter().map(|t| format!("density_t{:.6}ps", au_to_ps(*t))));
    let mut table = Table::new(cols);
    for i in 0..grid.n_points {
        let mut row = vec![num(grid.point(i))];
        row.extend(densities.iter().map(|s| num(s[i])));
        table.push(row);
    }
    let snaps: Vec<Value> = times
        .iter()
        .zip(&densities)
        .map(|(&t, s)| {
            json!({
                "t_ps": num(au_to_ps(t)),
                "t_over_T": num(t / ctx.t_cl),
                "peak_au": num(peak_location(&grid, s)),
                "centroid_au": num(centroid(&grid, s)),
            })
        })
        .collect();
    let mut rep = Report::default();
    ctx.put_level(&mut rep);
    rep.put("window", d.window);
    rep.put("captured_norm", d.captured_norm);
    rep.put("snapshots", snaps);
    rep.warnings.extend(d.warnings.iter().cloned());
    rep.table = Some(table);
    Ok(rep)
}

fn schedule_for(ctx: &Ctx, d: Option<&SpectralDecomposition>) -> Result<(rydberg_core::evolution::RevivalSchedule, Option<rydberg_core::evolution::DeltaN>), CliError> {
    let estimate = d.map(delta_n);
    let dn = match (ctx.sc.delta_n, estimate) {
        (Some(v), _) => v,
        (None, Some(e)) => e.e_fold_width,
        (None, None) => return Err(CliError::Config("delta_n is required".into())),
    };
    Ok((revival_schedule(ctx.centre.n_star, dn, ctx.sc.r_count)?, estimate))
}

fn autocorr(ctx: &Ctx) -> Result<Report, CliError> {
    let d = ctx.decomposition()?;
    let (sched, _) = schedule_for(ctx, Some(&d))?;
    let times = match &ctx.sc.times {
        Some(list) => ctx.units().parse_list(list)?,
        None => uniform_times(0.0, 1.2 * sched.t_revival, ctx.t_cl / 40.0)?,
    };
    let trace = autocorrelation(&d, &times);
    let min_height = ctx.sc.min_height.unwrap_or(0.3);
    let min_sep = match &ctx.sc.min_separation {
        Some(s) => ctx.units().parse_one(s)?,
        None => 0.5 * ctx.t_cl,
    };
    let peaks = detect_peaks(&trace, min_height, min_sep)?;

    let mut t = Table::new(["t_ps", "A"]);
    for (&tt, &a) in trace.times.iter().zip(&trace.values) {
        t.push(vec![num(au_to_ps(tt)), num(a)]);
    }
    let mut pt = Table::new(["t_ps", "A"]);
    for p in &peaks {
        pt.push(vec![num(au_to_ps(p.t)), num(p.value)]);
    }
    let mut rep = Report::default();
    ctx.put_level(&mut rep);
    rep.put("captured_norm", d.captured_norm);
    rep.put("t_classical_ps", au_to_ps(ctx.t_cl));
    rep.put("t_revival_ns", au_to_ns(sched.t_revival));
    rep.put("peak_count", peaks.len());
    rep.put(
        "empirical_collapse_ps",
        empirical_collapse_time(&trace, ctx.t_cl, 0.1).map(au_to_ps),
    );
    rep.warnings.extend(d.warnings.iter().cloned());
    rep.table = Some(t);
    rep.side_tables.push(("peaks".into(), pt));
    Ok(rep)
}

fn revivals(ctx: &Ctx) -> Result<Report, CliError> {
    let d = match ctx.sc.delta_n {
        Some(_) => None,
        None => Some(ctx.decomposition()?),
    };
    let (s, estimate) = schedule_for(ctx, d.as_ref())?;
    let mut rep = Report::default();
    ctx.put_level(&mut rep);
    rep.put("delta_n", s.delta_n);
    if let Some(e) = estimate {
        rep.put("delta_n_rms", e.rms);
        rep.put("delta_n_e_fold_width", e.e_fold_width);
    }
    rep.put("t_classical_au", s.t_classical);
    rep.put("t_classical_ps", au_to_ps(s.t_classical));
    rep.put("t_interference_au", s.t_interference);
    rep.put("t_interference_ps", au_to_ps(s.t_interference));
    rep.put("t_interference_over_T", s.t_interference / s.t_classical);
    rep.put("t_revival_au", s.t_revival);
    rep.put("t_revival_ns", au_to_ns(s.t_revival));
    let frac: Vec<Value> = s
        .fractional
        .iter()
        .map(|f| {
            json!({
                "r": f.r,
                "t_r_au": num(f.t_r),
                "t_r_ns": num(au_to_ns(f.t_r)),
                "period_r_au": num(f.period_r),
                "period_r_ps": num(au_to_ps(f.period_r)),
            })
        })
        .collect();
    rep.put("fractional", frac);
    let mut t = Table::new(["r", "t_r_ns", "period_r_ps"]);
    for f in &s.fractional {
        t.push(vec![json!(f.r), num(au_to_ns(f.t_r)), num(au_to_ps(f.period_r))]);
    }
    if ctx.sc.verbose {
        let grid: Vec<Value> = s
            .fractional_grid(8)
            .iter()
            .map(|f| json!({"p": f.p, "q": f.q, "packets": f.packets, "t_ns": num(au_to_ns(f.t))}))
            .collect();
        rep.put("fractional_grid", grid);
    }
    rep.table = Some(t);
    Ok(rep)
}

fn crosscheck(ctx: &Ctx) -> Result<Report, CliError> {
    if ctx.sc.r_min != 0.0 {
        return Err(CliError::Config("crosscheck needs r_min = 0".into()));
    }
    let d = ctx.decomposition()?;
    let p = ctx.rss()?;
    let grid = ctx.grid(0.0, DEFAULT_POINTS, Some(CN_DR))?;
    let t_end = match &ctx.sc.t_end {
        Some(s) => ctx.units().parse_one(s)?,
        None => ctx.t_cl,
    };
    if !(t_end > 0.0) {
        return Err(CliError::Config("t_end must be positive".into()));
    }
    let snaps = ctx.sc.snapshots;
    let requested = ctx
        .sc
        .steps
        .unwrap_or_else(|| (CN_STEPS_PER_PERIOD * t_end / ctx.t_cl).ceil() as usize);
    let per_snap = requested.div_ceil(snaps).max(1);
    let steps = per_snap * snaps;
    let dt = t_end / steps as f64;
    let stencil = if ctx.sc.stencil == "three-point" {
        Stencil::ThreePoint
    } else {
        Stencil::Numerov
    };
    let prop = CnPropagator::new(&grid, d.l_star, dt, stencil)?;
    let basis = EigenBasis::new(&d, &grid);
    let psi0 = p.sample(&grid);
    let mut u: Vec<Complex64> = prop.interior_of(&psi0)?;
    let norm0 = prop.norm_squared(&u);

    let mut t = Table::new(["t_ps", "l2_distance", "norm_drift"]);
    let mut last = 0.0;
    for k in 0..=snaps {
        if k > 0 {
            prop.advance(&mut u, per_snap);
        }
        let time = dt * (k * per_snap) as f64;
        let dist = prop.wavefunction_of(&u).l2_distance(&basis.evolve(time))?;
        last = dist;
        t.push(vec![num(au_to_ps(time)), num(dist), num(prop.norm_squared(&u) - norm0)]);
    }
    let mut rep = Report::default();
    ctx.put_level(&mut rep);
    rep.put("grid", json!({"r_max_au": num(grid.r_max), "points": grid.n_points}));
    rep.put("dt_au", dt);
    rep.put("steps", steps);
    rep.put("stencil", ctx.sc.stencil.as_str());
    rep.put("captured_norm", d.captured_norm);
    rep.put("final_l2_distance", last);
    rep.put("final_norm_drift", prop.norm_squared(&u) - norm0);
    rep.warnings.extend(prop.warnings().iter().cloned());
    let edge = u.last().map(|x| x.norm()).unwrap_or(0.0);
    if edge > rydberg_core::evolution::BOUNDARY_TOLERANCE * norm0.sqrt() {
        rep.warnings.push(format!("wave reaches the outer boundary (|u| = {edge:.3e}); reflections likely"));
    }
    rep.warnings.extend(d.warnings.iter().cloned());
    rep.table = Some(t);
    Ok(rep)
}
