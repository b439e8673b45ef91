mod commands;
mod error;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::output::{manifest_path, write_manifest, write_report, ManifestInfo};
use crate::scenario::{Format, Scenario, Settings};

/// Radial Rydberg wave packets in hydrogen and alkali atoms.
///
/// Scenario values come from an optional key = value config file and are
/// overridden by flags. Times accept the units ps (default), ns, au and T
/// (classical periods), fractions such as 4/9T, comma lists and
/// start:stop:step ranges.
#[derive(Parser, Debug)]
#[command(name = "rydberg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample an SQDT radial eigenfunction R_{n*l*}(r).
    Eigenstate(ScenarioArgs),
    /// Classical orbit observables and the orbit trace.
    Classical(ScenarioArgs),
    /// Packet density from a short laser pulse at several times.
    Perturb(ScenarioArgs),
    /// Solve for the radial squeezed state of a given n̄.
    RssInit(ScenarioArgs),
    /// Radial probability density of the initialized RSS.
    RssDensity(ScenarioArgs),
    /// Eigenstate coefficients c_n of the RSS.
    Decompose(ScenarioArgs),
    /// Eigenbasis time evolution of the RSS density.
    Evolve(ScenarioArgs),
    /// Autocorrelation trace and its detected peaks.
    Autocorr(ScenarioArgs),
    /// Predicted interference, revival and fractional revival times.
    Revivals(ScenarioArgs),
    /// Eigenbasis evolution against Crank-Nicolson propagation.
    Crosscheck(ScenarioArgs),
}

impl Command {
    fn parts(&self) -> (&'static str, &ScenarioArgs) {
        match self {
            Command::Eigenstate(a) => ("eigenstate", a),
            Command::Classical(a) => ("classical", a),
            Command::Perturb(a) => ("perturb", a),
            Command::RssInit(a) => ("rss-init", a),
            Command::RssDensity(a) => ("rss-density", a),
            Command::Decompose(a) => ("decompose", a),
            Command::Evolve(a) => ("evolve", a),
            Command::Autocorr(a) => ("autocorr", a),
            Command::Revivals(a) => ("revivals", a),
            Command::Crosscheck(a) => ("crosscheck", a),
        }
    }
}

#[derive(Args, Debug, Default)]
struct ScenarioArgs {
    /// key = value scenario file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; defaults to <subcommand>.<format> in the current directory
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Worker thread cap
    #[arg(long)]
    threads: Option<String>,
    /// Atom name from the built-in or user table
    #[arg(long)]
    atom: Option<String>,
    /// Additional atom data file (atom l delta I per line)
    #[arg(long)]
    atoms_file: Option<String>,
    #[arg(long)]
    n_bar: Option<String>,
    #[arg(long)]
    l: Option<String>,
    /// Principal quantum number for `eigenstate` (defaults to n_bar)
    #[arg(long)]
    n: Option<String>,
    /// Pulse FWHM in ps
    #[arg(long)]
    tau_ps: Option<String>,
    /// Ground level as n,l or n,l,delta,I
    #[arg(long)]
    ground: Option<String>,
    #[arg(long)]
    r_min: Option<String>,
    #[arg(long)]
    r_max: Option<String>,
    #[arg(long)]
    points: Option<String>,
    /// Grid spacing in a.u. (alternative to --points)
    #[arg(long)]
    dr: Option<String>,
    #[arg(long)]
    times: Option<String>,
    /// n window such as 75-95
    #[arg(long)]
    window: Option<String>,
    /// Include the pulse turn-on factor in `perturb`
    #[arg(long)]
    formation: bool,
    #[arg(long)]
    delta_n: Option<String>,
    /// Largest r in the fractional revival list
    #[arg(long)]
    r_count: Option<String>,
    /// Also list every (2p/q) fractional revival time
    #[arg(long)]
    verbose: bool,
    #[arg(long)]
    min_height: Option<String>,
    #[arg(long)]
    min_separation: Option<String>,
    #[arg(long)]
    t_end: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    snapshots: Option<String>,
    /// numerov or three-point
    #[arg(long)]
    stencil: Option<String>,
}

impl ScenarioArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        let pairs: [(&str, &Option<String>); 24] = [
            ("format", &self.format),
            ("threads", &self.threads),
            ("atom", &self.atom),
            ("atoms_file", &self.atoms_file),
            ("n_bar", &self.n_bar),
            ("l", &self.l),
            ("n", &self.n),
            ("tau_ps", &self.tau_ps),
            ("ground", &self.ground),
            ("r_min", &self.r_min),
            ("r_max", &self.r_max),
            ("points", &self.points),
            ("dr", &self.dr),
            ("times", &self.times),
            ("window", &self.window),
            ("delta_n", &self.delta_n),
            ("r_count", &self.r_count),
            ("min_height", &self.min_height),
            ("min_separation", &self.min_separation),
            ("t_end", &self.t_end),
            ("steps", &self.steps),
            ("snapshots", &self.snapshots),
            ("stencil", &self.stencil),
            ("output", &self.output.as_ref().map(|p| p.display().to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                s.set(k, v.clone());
            }
        }
        if self.formation {
            s.set("formation", "true");
        }
        if self.verbose {
            s.set("verbose", "true");
        }
        Ok(s)
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let (name, args) = cli.command.parts();
    let settings = args.settings()?;
    let sc = Scenario::from_settings(&settings)?;

    if let Some(n) = sc.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot set thread count: {e}")))?;
    }
    let format = sc.format.unwrap_or_else(|| commands::default_format(name));
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let path = sc.output.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.{ext}")));
    let inputs = serde_json::to_value(&sc).unwrap_or_default();

    let ctx = commands::Ctx::new(sc)?;
    let report = commands::run(name, &ctx)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let written = write_report(&report, format, &path)?;
    write_manifest(
        &manifest_path(&path),
        &ManifestInfo {
            command: name,
            inputs,
            outputs: &written,
            warnings: &report.warnings,
            started_unix,
            wall_seconds: started.elapsed().as_secs_f64(),
            threads: rayon::current_num_threads(),
        },
    )?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rydberg: {}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
