//! Frozen envelope constants.
//!
//! Each entry is keyed `probe/alpha` and holds the largest observed ratio of a
//! deviation to its error shape, inflated by the file's margin. Verification
//! suites compare fresh deviations against `constant × shape`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hexfloat;

pub const FIXTURE_SCHEMA: u32 = 1;

/// Inflation applied to observed maxima.
pub const DEFAULT_MARGIN: f64 = 1.25;

/// The checked-in calibration file of this crate.
pub fn default_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("calibration.json")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    #[serde(with = "hexfloat::serde_f64")]
    pub constant: f64,
    /// Largest `deviation / shape` seen during calibration.
    #[serde(with = "hexfloat::serde_f64")]
    pub observed_max: f64,
    pub samples: usize,
    pub shape: String,
}

impl Entry {
    /// Inflates `observed_max` away from zero in the permissive direction.
    pub fn from_max(observed_max: f64, samples: usize, margin: f64, shape: &str) -> Self {
        let constant = if observed_max >= 0.0 {
            observed_max * margin
        } else {
            observed_max / margin
        };
        Entry {
            constant,
            observed_max,
            samples,
            shape: shape.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixtures {
    pub schema_version: u32,
    #[serde(with = "hexfloat::serde_f64")]
    pub margin: f64,
    pub entries: BTreeMap<String, Entry>,
}

impl Default for Fixtures {
    fn default() -> Self {
        Fixtures {
            schema_version: FIXTURE_SCHEMA,
            margin: DEFAULT_MARGIN,
            entries: BTreeMap::new(),
        }
    }
}

pub fn key(probe: &str, alpha: &str) -> String {
    format!("{probe}/{alpha}")
}

impl Fixtures {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Fixtures(format!(
                "cannot read {}: {e}; run `sudler calibrate --out {}` first",
                path.display(),
                path.display()
            ))
        })?;
        let fx: Fixtures = serde_json::from_str(&text)?;
        if fx.schema_version != FIXTURE_SCHEMA {
            return Err(Error::Fixtures(format!(
                "schema version {} (expected {FIXTURE_SCHEMA}); rerun `sudler calibrate`",
                fx.schema_version
            )));
        }
        Ok(fx)
    }

    /// Pretty JSON with a trailing newline; byte-identical for equal contents.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn get(&self, probe: &str, alpha: &str) -> Result<f64> {
        let k = key(probe, alpha);
        self.entries.get(&k).map(|e| e.constant).ok_or_else(|| {
            Error::Fixtures(format!(
                "no entry `{k}`; run `sudler calibrate` (with `--alpha {alpha}` for a new α)"
            ))
        })
    }

    pub fn insert(&mut self, probe: &str, alpha: &str, entry: Entry) {
        self.entries.insert(key(probe, alpha), entry);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn margin_is_permissive_for_both_signs() {
        assert_eq!(Entry::from_max(2.0, 1, 1.25, "").constant, 2.5);
        assert_eq!(Entry::from_max(-2.0, 1, 1.25, "").constant, -1.6);
        assert_eq!(Entry::from_max(0.0, 1, 1.25, "").constant, 0.0);
    }

    #[test]
    fn json_round_trip_is_stable() {
        let mut fx = Fixtures::default();
        fx.insert("probe", "[0;(3)]", Entry::from_max(0.1, 4, 1.25, "1/a"));
        let text = fx.to_json().unwrap();
        let back: Fixtures = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fx);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn missing_entry_names_calibrate() {
        let err = Fixtures::default().get("probe", "[0;(3)]").unwrap_err();
        assert!(err.to_string().contains("sudler calibrate"));
    }

    #[test]
    fn missing_file_names_calibrate() {
        let err = Fixtures::load(Path::new("/nonexistent/cal.json")).unwrap_err();
        assert!(err.to_string().contains("calibrate"));
    }
}
