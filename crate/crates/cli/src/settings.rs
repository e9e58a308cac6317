use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use subplanck::phasespace::{parse_branch, parse_complex, Family, Normalization, StateSpec};
use subplanck::Error;

use crate::CliError;

/// Keys that describe a state.
pub const STATE_KEYS: [&str; 8] = ["family", "n", "r", "branch", "c1", "c2", "x0", "normalization"];
/// Keys that describe a sampling grid.
pub const GRID_KEYS: [&str; 6] = ["x-min", "x-max", "nx", "p-min", "p-max", "np"];

pub const DEFAULT_R: &str = "0.5";
pub const DEFAULT_C1: &str = "0.7071067811865476";
pub const DEFAULT_N: &str = "10";

/// Flat `key = value` run settings.
///
/// Keys use the long flag names without dashes, so `--x-min` is `x-min`.
/// Config files may spell them with underscores.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Settings(BTreeMap<String, String>);

/// What the sidecar of an earlier run records.
#[derive(Debug, Deserialize)]
struct Sidecar {
    command: String,
    settings: Settings,
}

fn canonical(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(canonical(key), value.into().trim().to_string());
    }

    pub fn set_default(&mut self, key: &str, value: &str) {
        self.0.entry(canonical(key)).or_insert_with(|| value.to_string());
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    /// Later values win.
    pub fn overlay(&mut self, other: Settings) {
        self.0.extend(other.0);
    }

    /// Reads a `key = value` file or the `.meta.json` sidecar of an earlier run.
    ///
    /// Returns the command recorded in a sidecar, if any.
    pub fn load(path: &Path) -> Result<(Option<String>, Settings), CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        let bad = |message: String| CliError::usage("--config", format!("{}: {message}", path.display()));
        if text.trim_start().starts_with('{') {
            let sidecar: Sidecar = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
            return Ok((Some(sidecar.command), sidecar.settings));
        }
        let mut out = Settings::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| bad(format!("line {}: expected key = value", k + 1)))?;
            out.set(key, value);
        }
        Ok((None, out))
    }

    /// Rejects keys outside `allowed`.
    pub fn only(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.0.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::usage(&format!("--{k}"), "not accepted by this command".into())),
            None => Ok(()),
        }
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| CliError::usage(&format!("--{key}"), format!("cannot parse '{v}'"))))
            .transpose()
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.parse(key)?.ok_or_else(|| CliError::usage(&format!("--{key}"), "is required".into()))
    }

    pub fn family(&self) -> Result<Family, CliError> {
        let v = self.get("family").ok_or_else(|| CliError::usage("--family", "is required".into()))?;
        v.parse().map_err(|e: Error| CliError::usage("--family", e.to_string()))
    }

    /// Fills the standard defaults (r = 0.5, balanced weights, n = 10) for the keys `family` takes.
    pub fn state_defaults(&mut self, family: Family) {
        if family.uses_photons() {
            self.set_default("n", DEFAULT_N);
        }
        if family.uses_squeeze() {
            self.set_default("r", DEFAULT_R);
        }
        if family.uses_branch() {
            self.set_default("branch", "+");
        }
        if family.uses_weights() {
            self.set_default("c1", DEFAULT_C1);
        }
        if family.uses_x0() {
            self.set_default("x0", if family == Family::Compass { "4" } else { "0" });
        }
        self.set_default("normalization", "origin");
    }

    /// Builds and validates the state; `n` and `x0` must be single values here.
    pub fn state(&self) -> Result<StateSpec, CliError> {
        let family = self.family()?;
        for (key, used) in [
            ("n", family.uses_photons()),
            ("r", family.uses_squeeze()),
            ("branch", family.uses_branch()),
            ("c1", family.uses_weights()),
            ("c2", family.uses_weights()),
            ("x0", family.uses_x0()),
        ] {
            if self.contains(key) && !used {
                return Err(CliError::usage(&format!("--{key}"), format!("does not apply to family {family}")));
            }
        }
        let complex = |key: &str| -> Result<_, CliError> {
            self.get(key)
                .map(|v| parse_complex(v).map_err(|e| CliError::usage(&format!("--{key}"), e.to_string())))
                .transpose()
        };
        let spec = StateSpec {
            family,
            n: self.parse("n")?,
            r: self.parse("r")?,
            branch: self
                .get("branch")
                .map(|v| parse_branch(v).map_err(|e| CliError::usage("--branch", e.to_string())))
                .transpose()?,
            c1: complex("c1")?,
            c2: complex("c2")?,
            x0: self.parse("x0")?,
            normalization: match self.get("normalization") {
                Some(v) => v.parse::<Normalization>().map_err(|e| CliError::usage("--normalization", e.to_string()))?,
                None => Normalization::Origin,
            },
        }
        .complete();
        spec.validate().map_err(|e| CliError::usage(blame(&e), e.to_string()))?;
        Ok(spec)
    }
}

/// The flag a spec validation error is about.
fn blame(e: &Error) -> &'static str {
    match e {
        Error::SingularParameter(_) => "--r",
        Error::InvalidInput(m) if m.starts_with("r =") => "--r",
        Error::InvalidInput(m) if m.starts_with("x0 =") => "--x0",
        Error::InvalidInput(m) if m.contains("c1") => "--c1",
        Error::InvalidInput(m) if m.contains("'n'") => "--n",
        _ => "--family",
    }
}

/// Parses `a:b`, `a:b:step` or a comma list into ascending values.
pub fn parse_values(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    let flag = format!("--{key}");
    let num = |t: &str| -> Result<f64, CliError> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::usage(&flag, format!("cannot parse '{t}' in '{s}'")))
    };
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() > 3 {
            return Err(CliError::usage(&flag, format!("range '{s}' has more than three parts")));
        }
        let (lo, hi) = (num(parts[0])?, num(parts[1])?);
        let step = parts.get(2).map(|t| num(t)).transpose()?.unwrap_or(1.0);
        if !(step > 0.0) || hi < lo {
            return Err(CliError::usage(&flag, format!("range '{s}' is empty")));
        }
        // multiplying avoids accumulated rounding in the endpoints
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| lo + k as f64 * step).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::usage(&flag, format!("values in '{s}' must be strictly ascending")));
    }
    Ok(values)
}

/// [`parse_values`] restricted to nonnegative integers.
pub fn parse_counts(key: &str, s: &str) -> Result<Vec<usize>, CliError> {
    parse_values(key, s)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(CliError::usage(&format!("--{key}"), format!("{v} is not a nonnegative integer")))
            }
        })
        .collect()
}

/// Parses `x,p;x,p;...`.
pub fn parse_points(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    s.split(';')
        .map(|pair| {
            let bad = || CliError::usage("--at", format!("expected x,p but got '{pair}'"));
            let (x, p) = pair.split_once(',').ok_or_else(bad)?;
            let x: f64 = x.trim().parse().map_err(|_| bad())?;
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            if x.is_finite() && p.is_finite() {
                Ok((x, p))
            } else {
                Err(bad())
            }
        })
        .collect()
}

/// Sidecar path for a data file.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}
