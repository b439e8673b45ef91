use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Built-in channel table shipped with the crate.
pub const BUILTIN_ATOMS: &str = include_str!("../../data/atoms.dat");

/// Quantum defect and supersymmetry integer of one angular channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelSpec {
    pub l: u32,
    pub delta: f64,
    pub susy_int: u32,
}

impl ChannelSpec {
    pub fn new(l: u32, delta: f64, susy_int: u32) -> Result<Self> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(Error::Config(format!(
                "quantum defect must be finite and >= 0, got {delta} for l={l}"
            )));
        }
        let ch = Self { l, delta, susy_int };
        if !(ch.l_star() > -1.0) {
            return Err(Error::Config(format!(
                "channel l={l} has l* = {} <= -1; the eigenfunctions are not normalizable",
                ch.l_star()
            )));
        }
        Ok(ch)
    }

    pub fn hydrogenic(l: u32) -> Self {
        Self {
            l,
            delta: 0.0,
            susy_int: 0,
        }
    }

    /// l* = l - δ(l) + I(l)
    pub fn l_star(&self) -> f64 {
        self.l as f64 - self.delta + self.susy_int as f64
    }
}

/// Per-atom table of angular channels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomModel {
    pub name: String,
    pub channels: BTreeMap<u32, ChannelSpec>,
    /// Every channel not listed explicitly is Coulombic (δ = 0, I = 0).
    hydrogenic: bool,
}

impl AtomModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            channels: BTreeMap::new(),
            hydrogenic: false,
        }
    }

    pub fn hydrogen() -> Self {
        Self {
            name: "hydrogen".into(),
            channels: BTreeMap::new(),
            hydrogenic: true,
        }
    }

    pub fn with_channel(mut self, ch: ChannelSpec) -> Self {
        self.channels.insert(ch.l, ch);
        self
    }

    pub fn is_hydrogenic(&self) -> bool {
        self.hydrogenic
    }

    pub fn channel(&self, l: u32) -> Result<ChannelSpec> {
        match self.channels.get(&l) {
            Some(ch) => Ok(*ch),
            None if self.hydrogenic => Ok(ChannelSpec::hydrogenic(l)),
            None => Err(Error::Config(format!(
                "atom '{}' has no channel for l={l}",
                self.name
            ))),
        }
    }

    /// Look up one of the built-in atoms (hydrogen, rubidium, potassium).
    pub fn builtin(name: &str) -> Result<Self> {
        let table = AtomTable::parse(BUILTIN_ATOMS)?;
        table.get(name)
    }
}

/// A set of atom models parsed from the tabular channel format.
///
/// Grammar, one record per non-empty line:
///
/// ```text
/// line    := record | comment | blank
/// record  := atom WS l WS delta WS susy_int [comment]
/// comment := '#' any*
/// ```
///
/// `atom` is matched case-insensitively. A record for an atom named
/// `hydrogen` overrides the all-zero default for that channel.
#[derive(Debug, Clone, Default)]
pub struct AtomTable {
    atoms: BTreeMap<String, AtomModel>,
}

impl AtomTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut atoms: BTreeMap<String, AtomModel> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 4 fields (atom l delta susy_int), found {}", fields.len()),
                });
            }
            let name = fields[0].to_ascii_lowercase();
            let l: u32 = parse_field(fields[1], "l", line_no)?;
            let delta: f64 = parse_field(fields[2], "delta", line_no)?;
            let susy_int: u32 = parse_field(fields[3], "susy_int", line_no)?;
            let ch = ChannelSpec::new(l, delta, susy_int).map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            let atom = atoms.entry(name.clone()).or_insert_with(|| {
                if name == "hydrogen" {
                    AtomModel::hydrogen()
                } else {
                    AtomModel::new(name.clone())
                }
            });
            if atom.channels.insert(l, ch).is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("duplicate channel l={l} for atom '{name}'"),
                });
            }
        }
        Ok(Self { atoms })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn builtin() -> Self {
        Self::parse(BUILTIN_ATOMS).expect("built-in atom table is valid")
    }

    /// Records in `other` replace same-named atoms here.
    pub fn merge(&mut self, other: AtomTable) {
        self.atoms.extend(other.atoms);
    }

    pub fn get(&self, name: &str) -> Result<AtomModel> {
        self.atoms
            .get(&name.to_ascii_lowercase())
            .cloned()
            .ok_or_else(|| Error::Config(format!("unknown atom '{name}'")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.atoms.keys().map(String::as_str)
    }
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {what} from '{s}'"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_table_has_reference_atoms() {
        let rb = AtomModel::builtin("Rubidium").unwrap();
        let p = rb.channel(1).unwrap();
        assert_eq!((p.delta, p.susy_int), (2.65, 3));
        assert!((p.l_star() - 1.35).abs() < 1e-12);
        let k = AtomModel::builtin("potassium").unwrap();
        assert!((k.channel(1).unwrap().l_star() - 1.29).abs() < 1e-12);
        assert!(k.channel(0).is_err());
    }

    #[test]
    fn hydrogen_resolves_every_channel() {
        let h = AtomModel::builtin("hydrogen").unwrap();
        for l in 0..12 {
            let ch = h.channel(l).unwrap();
            assert_eq!((ch.delta, ch.susy_int), (0.0, 0));
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "# header\nsodium 0 1.35 1\nsodium 1 0.85\n";
        match AtomTable::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let dup = "x 1 0.1 0\nx 1 0.2 0\n";
        assert!(matches!(AtomTable::parse(dup), Err(Error::Parse { line: 2, .. })));
        let bad = "x 0 2.5 0 # l* = -2.5\n";
        assert!(matches!(AtomTable::parse(bad), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn user_table_with_trailing_comments() {
        let t = AtomTable::parse("Sodium 0 1.35 1  # s\nsodium 1 0.85 1\n").unwrap();
        let na = t.get("SODIUM").unwrap();
        assert!((na.channel(0).unwrap().l_star() + 0.35).abs() < 1e-12);
        assert!((na.channel(1).unwrap().l_star() - 1.15).abs() < 1e-12);
    }
}
