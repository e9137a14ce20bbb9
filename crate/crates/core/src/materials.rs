//! Shore-A hardness to Young's modulus.
//!
//! A small table of known moduli is consulted first; hardness values not in
//! the table go through a fallback. The default table only knows the 50A
//! digital material. Table files hold one `shoreA=modulus_MPa` pair per line
//! and are merged over the defaults.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shell::{MaterialModel, ModulusSource};

/// Accepted hardness range.
pub const MIN_SHORE: f64 = 20.0;
pub const MAX_SHORE: f64 = 95.0;

/// Hardness grades the printer can produce.
pub const PRINTABLE_SHORE: [f64; 5] = [30.0, 40.0, 50.0, 60.0, 70.0];

/// Calibration point every fallback passes through.
pub const ANCHOR_SHORE: f64 = 50.0;
pub const ANCHOR_MODULUS: f64 = 1.65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fallback {
    /// Gent's hardness relation rescaled through the anchor.
    GentFormula,
    /// Piecewise-linear interpolation of ln E between table entries.
    LinearLogInterpolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessTable {
    entries: Vec<(f64, f64)>,
    fallback: Fallback,
}

impl Default for HardnessTable {
    fn default() -> Self {
        HardnessTable {
            entries: vec![(ANCHOR_SHORE, ANCHOR_MODULUS)],
            fallback: Fallback::GentFormula,
        }
    }
}

impl HardnessTable {
    /// Builds a table from `(shore_A, E_MPa)` pairs, sorted by hardness.
    pub fn new(mut entries: Vec<(f64, f64)>, fallback: Fallback) -> Result<Self> {
        entries.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(s, e) in &entries {
            if !(s.is_finite() && s > 0.0 && s < 100.0) {
                return Err(Error::InvalidTable(format!("hardness {s} outside (0, 100)")));
            }
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidTable(format!("modulus {e} must be positive")));
            }
        }
        for w in entries.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidTable(format!("duplicate hardness {}", w[0].0)));
            }
            if w[1].1 <= w[0].1 {
                return Err(Error::InvalidTable(format!(
                    "modulus must increase with hardness ({}A -> {}A)",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(HardnessTable { entries, fallback })
    }

    /// A table without entries; every lookup goes through the fallback.
    pub fn empty(fallback: Fallback) -> Self {
        HardnessTable {
            entries: Vec::new(),
            fallback,
        }
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn fallback(&self) -> Fallback {
        self.fallback
    }

    pub fn with_fallback(mut self, fallback: Fallback) -> Self {
        self.fallback = fallback;
        self
    }

    /// Returns a copy with `overrides` replacing or adding entries.
    pub fn merged(&self, overrides: &[(f64, f64)]) -> Result<Self> {
        let mut entries = self.entries.clone();
        for &(s, e) in overrides {
            match entries.iter_mut().find(|(k, _)| *k == s) {
                Some(slot) => slot.1 = e,
                None => entries.push((s, e)),
            }
        }
        HardnessTable::new(entries, self.fallback)
    }

    /// Default table with the entries of a `shoreA=modulus_MPa` file applied.
    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Result<Self>> {
        let text = fs::read_to_string(path)?;
        Ok(parse_entries(&text).and_then(|e| HardnessTable::default().merged(&e)))
    }

    fn lookup(&self, shore: f64) -> Option<f64> {
        self.entries.iter().find(|(s, _)| *s == shore).map(|(_, e)| *e)
    }

    fn interpolate_log(&self, shore: f64) -> Result<f64> {
        if self.entries.len() < 2 {
            return Err(Error::InvalidTable(
                "log interpolation needs at least two entries".into(),
            ));
        }
        let n = self.entries.len();
        let k = self
            .entries
            .iter()
            .position(|(s, _)| *s > shore)
            .unwrap_or(n)
            .clamp(1, n - 1);
        let (s0, e0) = self.entries[k - 1];
        let (s1, e1) = self.entries[k];
        let w = (shore - s0) / (s1 - s0);
        Ok((e0.ln() + w * (e1.ln() - e0.ln())).exp())
    }
}

impl FromStr for HardnessTable {
    type Err = Error;

    /// Parses a table file and merges it over the default table.
    fn from_str(s: &str) -> Result<Self> {
        HardnessTable::default().merged(&parse_entries(s)?)
    }
}

/// Parses `shoreA=modulus_MPa` lines. Blank lines and `#` comments are
/// skipped.
pub fn parse_entries(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: &str| Error::TableParse {
            line: idx + 1,
            message: message.to_string(),
        };
        let (k, v) = line.split_once('=').ok_or_else(|| err("expected shoreA=modulus"))?;
        let shore: f64 = k.trim().parse().map_err(|_| err("bad hardness value"))?;
        let modulus: f64 = v.trim().parse().map_err(|_| err("bad modulus value"))?;
        entries.push((shore, modulus));
    }
    Ok(entries)
}

/// Gent's relation between Shore-A hardness and Young's modulus, MPa.
pub fn gent_modulus(shore: f64) -> f64 {
    0.0981 * (56.0 + 7.62336 * shore) / (0.137505 * (254.0 - 2.54 * shore))
}

/// Gent's relation scaled by one factor so it passes through the anchor.
pub fn calibrated_gent_modulus(shore: f64) -> f64 {
    gent_modulus(shore) * (ANCHOR_MODULUS / gent_modulus(ANCHOR_SHORE))
}

/// Young's modulus for a hardness: exact table hit, else the table's fallback.
pub fn modulus_for_hardness(table: &HardnessTable, shore: f64) -> Result<MaterialModel> {
    if !(shore.is_finite() && (MIN_SHORE..=MAX_SHORE).contains(&shore)) {
        return Err(Error::HardnessOutOfRange(shore));
    }
    if let Some(e) = table.lookup(shore) {
        return MaterialModel::from_hardness(e, shore, ModulusSource::Table);
    }
    let e = match table.fallback {
        Fallback::GentFormula => calibrated_gent_modulus(shore),
        Fallback::LinearLogInterpolation => table.interpolate_log(shore)?,
    };
    MaterialModel::from_hardness(e, shore, ModulusSource::FallbackFormula)
}
