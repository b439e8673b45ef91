//! Scenario configuration: `key = value` files overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Every key a scenario understands. Flags use the same names with `-`.
pub const KEYS: &[&str] = &[
    "atom",
    "atoms_file",
    "n_bar",
    "l",
    "n",
    "tau_ps",
    "ground",
    "r_min",
    "r_max",
    "points",
    "dr",
    "times",
    "window",
    "formation",
    "delta_n",
    "r_count",
    "verbose",
    "min_height",
    "min_separation",
    "t_end",
    "steps",
    "snapshots",
    "stencil",
    "format",
    "output",
    "threads",
];

/// Raw key/value pairs in the order they were merged.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("config line {}: expected key = value", i + 1)))?;
            let key = normalize(k);
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!("config line {}: unknown key '{}'", i + 1, k.trim())));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(normalize(key), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("{key}: cannot parse '{v}'"))),
        }
    }

    fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(CliError::Config(format!("{key}: expected true or false, got '{v}'"))),
        }
    }
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Ground level as (n, l, δ, I).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundSpec {
    pub n: u32,
    pub l: u32,
    pub delta: f64,
    pub susy_int: u32,
}

/// A fully resolved scenario. Optional fields fall back to per-command
/// defaults.
#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub atom: String,
    pub atoms_file: Option<PathBuf>,
    pub n_bar: u32,
    pub l: u32,
    pub n: Option<u32>,
    pub tau_ps: f64,
    pub ground: GroundSpec,
    pub r_min: f64,
    pub r_max: Option<f64>,
    pub points: Option<usize>,
    pub dr: Option<f64>,
    pub times: Option<String>,
    pub window: Option<(u32, u32)>,
    pub formation: bool,
    pub delta_n: Option<f64>,
    pub r_count: u32,
    pub verbose: bool,
    pub min_height: Option<f64>,
    pub min_separation: Option<String>,
    pub t_end: Option<String>,
    pub steps: Option<usize>,
    pub snapshots: usize,
    pub stencil: String,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Scenario {
    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        let atom = s.get("atom").unwrap_or("hydrogen").to_string();
        let n_bar = s
            .parsed::<u32>("n_bar")?
            .ok_or_else(|| CliError::Config("n_bar is required".into()))?;
        let l = s.parsed("l")?.unwrap_or(1);
        let window = match s.get("window") {
            None => None,
            Some(w) => Some(parse_window(w)?),
        };
        let ground = match s.get("ground") {
            None => GroundSpec {
                n: 1,
                l: 0,
                delta: 0.0,
                susy_int: 0,
            },
            Some(g) => parse_ground(g)?,
        };
        let format = match s.get("format") {
            None => None,
            Some("csv") => Some(Format::Csv),
            Some("json") => Some(Format::Json),
            Some(f) => return Err(CliError::Config(format!("format must be csv or json, got '{f}'"))),
        };
        let stencil = s.get("stencil").unwrap_or("numerov").to_string();
        if !matches!(stencil.as_str(), "numerov" | "three-point") {
            return Err(CliError::Config(format!("stencil must be numerov or three-point, got '{stencil}'")));
        }
        let sc = Self {
            atom,
            atoms_file: s.get("atoms_file").map(PathBuf::from),
            n_bar,
            l,
            n: s.parsed("n")?,
            tau_ps: s.parsed("tau_ps")?.unwrap_or(8.0),
            ground,
            r_min: s.parsed("r_min")?.unwrap_or(0.0),
            r_max: s.parsed("r_max")?,
            points: s.parsed("points")?,
            dr: s.parsed("dr")?,
            times: s.get("times").map(str::to_string),
            window,
            formation: s.flag("formation")?,
            delta_n: s.parsed("delta_n")?,
            r_count: s.parsed("r_count")?.unwrap_or(4),
            verbose: s.flag("verbose")?,
            min_height: s.parsed("min_height")?,
            min_separation: s.get("min_separation").map(str::to_string),
            t_end: s.get("t_end").map(str::to_string),
            steps: s.parsed("steps")?,
            snapshots: s.parsed("snapshots")?.unwrap_or(10),
            stencil,
            format,
            output: s.get("output").map(PathBuf::from),
            threads: s.parsed("threads")?,
        };
        sc.validate()?;
        Ok(sc)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.n_bar == 0 {
            return Err(CliError::Config("n_bar must be positive".into()));
        }
        if !(self.tau_ps > 0.0) {
            return Err(CliError::Config(format!("tau_ps must be positive, got {}", self.tau_ps)));
        }
        if let Some(r) = self.r_max {
            if !(r > self.r_min) {
                return Err(CliError::Config(format!("r_max = {r} must exceed r_min = {}", self.r_min)));
            }
        }
        if self.r_min < 0.0 {
            return Err(CliError::Config("r_min must be >= 0".into()));
        }
        if self.snapshots == 0 {
            return Err(CliError::Config("snapshots must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be positive".into()));
        }
        Ok(())
    }
}

fn parse_window(w: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Config(format!("window must look like 75-95 or 75:95, got '{w}'"));
    let (a, b) = w.split_once(['-', ':']).ok_or_else(bad)?;
    let lo: u32 = a.trim().parse().map_err(|_| bad())?;
    let hi: u32 = b.trim().parse().map_err(|_| bad())?;
    if hi < lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_ground(g: &str) -> Result<GroundSpec, CliError> {
    let bad = || CliError::Config(format!("ground must be n,l or n,l,delta,I, got '{g}'"));
    let parts: Vec<&str> = g.split(',').map(str::trim).collect();
    let int = |s: &str| s.parse::<u32>().map_err(|_| bad());
    match parts.as_slice() {
        [n, l] => Ok(GroundSpec {
            n: int(n)?,
            l: int(l)?,
            delta: 0.0,
            susy_int: 0,
        }),
        [n, l, d, i] => Ok(GroundSpec {
            n: int(n)?,
            l: int(l)?,
            delta: d.parse().map_err(|_| bad())?,
            susy_int: int(i)?,
        }),
        _ => Err(bad()),
    }
}

/// Converts time expressions to atomic units.
///
/// A time is a number (or a fraction p/q) with an optional unit: `ps`
/// (default), `ns`, `au`, or `T` for multiples of the classical period.
/// A list is comma separated; `start:stop:step` expands to a range.
#[derive(Debug, Clone, Copy)]
pub struct TimeUnits {
    pub t_classical: f64,
}

impl TimeUnits {
    pub fn parse_one(&self, s: &str) -> Result<f64, CliError> {
        let s = s.trim();
        let bad = || CliError::Config(format!("cannot parse time '{s}'"));
        let (num, scale) = if let Some(v) = s.strip_suffix("ps") {
            (v, rydberg_core::units::ps_to_au(1.0))
        } else if let Some(v) = s.strip_suffix("ns") {
            (v, rydberg_core::units::ps_to_au(1000.0))
        } else if let Some(v) = s.strip_suffix("au") {
            (v, 1.0)
        } else if let Some(v) = s.strip_suffix('T') {
            (v, self.t_classical)
        } else {
            (s, rydberg_core::units::ps_to_au(1.0))
        };
        let num = num.trim();
        let value = match num.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p.trim().parse().map_err(|_| bad())?;
                let q: f64 = q.trim().parse().map_err(|_| bad())?;
                if q == 0.0 {
                    return Err(bad());
                }
                p / q
            }
            None if num.is_empty() => 1.0,
            None => num.parse().map_err(|_| bad())?,
        };
        let t = value * scale;
        if !t.is_finite() || t < 0.0 {
            return Err(CliError::Config(format!("times must be finite and non-negative, got '{s}'")));
        }
        Ok(t)
    }

    pub fn parse_list(&self, text: &str) -> Result<Vec<f64>, CliError> {
        let mut out = Vec::new();
        for item in text.split(',').filter(|x| !x.trim().is_empty()) {
            let parts: Vec<&str> = item.split(':').collect();
            match parts.as_slice() {
                [one] => out.push(self.parse_one(one)?),
                [a, b, step] => {
                    let (a, b, step) = (self.parse_one(a)?, self.parse_one(b)?, self.parse_one(step)?);
                    let range = rydberg_core::evolution::uniform_times(a, b, step)
                        .map_err(|e| CliError::Config(format!("time range '{item}': {e}")))?;
                    out.extend(range);
                }
                _ => return Err(CliError::Config(format!("time item '{item}' is neither a time nor start:stop:step"))),
            }
        }
        if out.is_empty() {
            return Err(CliError::Config("empty time list".into()));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut s = Settings::parse("# demo\natom = rubidium\nn-bar = 85\nwindow=75-95\n").unwrap();
        s.set("n_bar", "20");
        let sc = Scenario::from_settings(&s).unwrap();
        assert_eq!(sc.atom, "rubidium");
        assert_eq!(sc.n_bar, 20);
        assert_eq!(sc.window, Some((75, 95)));
        assert_eq!(sc.ground.n, 1);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(Settings::parse("colour = red"), Err(CliError::Config(_))));
        assert!(matches!(Settings::parse("atom hydrogen"), Err(CliError::Config(_))));
        let s = Settings::parse("n_bar = eighty").unwrap();
        assert!(Scenario::from_settings(&s).is_err());
        let s = Settings::parse("n_bar = 20\nformat = xml").unwrap();
        assert!(Scenario::from_settings(&s).is_err());
    }

    #[test]
    fn time_expressions() {
        let u = TimeUnits { t_classical: 900.0 };
        assert_eq!(u.parse_one("1/9T").unwrap(), 100.0);
        assert_eq!(u.parse_one("T").unwrap(), 900.0);
        assert_eq!(u.parse_one("12au").unwrap(), 12.0);
        let ps = rydberg_core::units::ps_to_au(1.0);
        assert_eq!(u.parse_one("2").unwrap(), 2.0 * ps);
        assert_eq!(u.parse_one("2ps").unwrap(), 2.0 * ps);
        assert_eq!(u.parse_list("0:1T:1/4T").unwrap(), vec![0.0, 225.0, 450.0, 675.0, 900.0]);
        assert_eq!(u.parse_list("1/9T,2/9T").unwrap(), vec![100.0, 200.0]);
        assert!(u.parse_one("-1ps").is_err());
        assert!(u.parse_one("xT").is_err());
    }
}
