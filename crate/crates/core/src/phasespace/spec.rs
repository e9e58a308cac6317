use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Branch, Error, Operation, Result};

/// Tolerance on `|c1|² + |c2|² = 1`.
pub const WEIGHT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Coherent,
    Compass,
    Svs,
    Pasvs,
    Pssvs,
    Spasvs,
    Spssvs,
    MixPa,
    MixPs,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Coherent,
        Family::Compass,
        Family::Svs,
        Family::Pasvs,
        Family::Pssvs,
        Family::Spasvs,
        Family::Spssvs,
        Family::MixPa,
        Family::MixPs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Coherent => "coherent",
            Family::Compass => "compass",
            Family::Svs => "svs",
            Family::Pasvs => "pasvs",
            Family::Pssvs => "pssvs",
            Family::Spasvs => "spasvs",
            Family::Spssvs => "spssvs",
            Family::MixPa => "mix_pa",
            Family::MixPs => "mix_ps",
        }
    }

    /// Photon operation for the squeezed families.
    pub fn operation(self) -> Option<Operation> {
        match self {
            Family::Pasvs | Family::Spasvs | Family::MixPa => Some(Operation::Added),
            Family::Pssvs | Family::Spssvs | Family::MixPs => Some(Operation::Subtracted),
            _ => None,
        }
    }

    pub fn uses_x0(self) -> bool {
        matches!(self, Family::Coherent | Family::Compass)
    }

    pub fn uses_squeeze(self) -> bool {
        !self.uses_x0()
    }

    pub fn uses_photons(self) -> bool {
        self.operation().is_some()
    }

    pub fn uses_branch(self) -> bool {
        matches!(self, Family::Svs | Family::Pasvs | Family::Pssvs)
    }

    pub fn uses_weights(self) -> bool {
        matches!(self, Family::Spasvs | Family::Spssvs | Family::MixPa | Family::MixPs)
    }

    pub fn is_mixture(self) -> bool {
        matches!(self, Family::MixPa | Family::MixPs)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown family '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Divide by the magnitude of the value at the phase-space origin.
    #[default]
    Origin,
    /// Trace-normalised state, `∫ W d²α = 1`.
    Physical,
}

impl FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "origin" => Ok(Normalization::Origin),
            "physical" => Ok(Normalization::Physical),
            _ => Err(Error::InvalidInput(format!("unknown normalization '{s}'"))),
        }
    }
}

/// Declarative description of a state.
///
/// Only the fields meaningful for `family` may be set; [`StateSpec::validate`]
/// enforces this together with `|c1|² + |c2|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<Branch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c1: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<Complex64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default)]
    pub normalization: Normalization,
}

impl StateSpec {
    fn bare(family: Family) -> Self {
        Self { family, n: None, r: None, branch: None, c1: None, c2: None, x0: None, normalization: Normalization::Origin }
    }

    /// Coherent state centred at `x = x0` on the position axis.
    pub fn coherent(x0: f64) -> Self {
        Self { x0: Some(x0), ..Self::bare(Family::Coherent) }
    }

    pub fn compass(x0: f64) -> Self {
        Self { x0: Some(x0), ..Self::bare(Family::Compass) }
    }

    pub fn svs(r: f64, branch: Branch) -> Self {
        Self { r: Some(r), branch: Some(branch), ..Self::bare(Family::Svs) }
    }

    /// Single-branch photon-added or photon-subtracted state.
    pub fn single(op: Operation, n: usize, r: f64, branch: Branch) -> Self {
        let family = match op {
            Operation::Added => Family::Pasvs,
            Operation::Subtracted => Family::Pssvs,
        };
        Self { n: Some(n), r: Some(r), branch: Some(branch), ..Self::bare(family) }
    }

    /// Branch superposition with real `c1` and `c2 = √(1 − c1²)`.
    pub fn superposition(op: Operation, n: usize, r: f64, c1: f64) -> Self {
        let family = match op {
            Operation::Added => Family::Spasvs,
            Operation::Subtracted => Family::Spssvs,
        };
        Self::weighted(family, n, r, c1)
    }

    /// Branch mixture with weights `c1²` and `1 − c1²`.
    pub fn mixture(op: Operation, n: usize, r: f64, c1: f64) -> Self {
        let family = match op {
            Operation::Added => Family::MixPa,
            Operation::Subtracted => Family::MixPs,
        };
        Self::weighted(family, n, r, c1)
    }

    fn weighted(family: Family, n: usize, r: f64, c1: f64) -> Self {
        let c2 = (1.0 - c1 * c1).max(0.0).sqrt();
        Self {
            n: Some(n),
            r: Some(r),
            c1: Some(Complex64::new(c1, 0.0)),
            c2: Some(Complex64::new(c2, 0.0)),
            ..Self::bare(family)
        }
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// Photon number; zero for families without one.
    pub fn photons(&self) -> usize {
        self.n.unwrap_or(0)
    }

    pub fn squeeze(&self) -> f64 {
        self.r.unwrap_or(0.0)
    }

    pub fn separation(&self) -> f64 {
        self.x0.unwrap_or(0.0)
    }

    pub fn weights(&self) -> (Complex64, Complex64) {
        (self.c1.unwrap_or(Complex64::new(1.0, 0.0)), self.c2.unwrap_or(Complex64::new(0.0, 0.0)))
    }

    pub fn branch_or_plus(&self) -> Branch {
        self.branch.unwrap_or(Branch::Plus)
    }

    /// Fills `c2 = √(1 − |c1|²)` when only `c1` is given.
    pub fn complete(mut self) -> Self {
        if self.family.uses_weights() && self.c2.is_none() {
            if let Some(c1) = self.c1 {
                self.c2 = Some(Complex64::new((1.0 - c1.norm_sqr()).max(0.0).sqrt(), 0.0));
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.family;
        let field = |present: bool, wanted: bool, name: &str| -> Result<()> {
            match (present, wanted) {
                (false, true) => Err(Error::InvalidInput(format!("family {f} requires '{name}'"))),
                (true, false) => Err(Error::InvalidInput(format!("family {f} does not take '{name}'"))),
                _ => Ok(()),
            }
        };
        field(self.n.is_some(), f.uses_photons(), "n")?;
        field(self.r.is_some(), f.uses_squeeze(), "r")?;
        field(self.branch.is_some(), f.uses_branch(), "branch")?;
        field(self.c1.is_some(), f.uses_weights(), "c1")?;
        field(self.c2.is_some(), f.uses_weights(), "c2")?;
        field(self.x0.is_some(), f.uses_x0(), "x0")?;
        if let Some(r) = self.r {
            if !(0.0..=3.0).contains(&r) {
                return Err(Error::InvalidInput(format!("r = {r} outside [0, 3]")));
            }
            if r == 0.0 && self.photons() > 0 {
                return Err(Error::SingularParameter(format!("r = 0 with n = {}", self.photons())));
            }
        }
        if let Some(x0) = self.x0 {
            if !x0.is_finite() || (f == Family::Compass && x0 <= 0.0) {
                return Err(Error::InvalidInput(format!("x0 = {x0} invalid for {f}")));
            }
        }
        if f.uses_weights() {
            let (c1, c2) = self.weights();
            let total = c1.norm_sqr() + c2.norm_sqr();
            if (total - 1.0).abs() > WEIGHT_TOLERANCE {
                return Err(Error::InvalidInput(format!("|c1|² + |c2|² = {total}, expected 1")));
            }
        }
        Ok(())
    }

    /// Builds a spec from `key = value` pairs; unknown keys are rejected.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut family = None;
        let mut spec = Self::bare(Family::Coherent);
        for (k, v) in pairs {
            let v = v.trim();
            match k.trim() {
                "family" => family = Some(v.parse::<Family>()?),
                "n" => spec.n = Some(parse_num(k, v)?),
                "r" => spec.r = Some(parse_num(k, v)?),
                "branch" => spec.branch = Some(parse_branch(v)?),
                "c1" => spec.c1 = Some(parse_complex(v)?),
                "c2" => spec.c2 = Some(parse_complex(v)?),
                "x0" => spec.x0 = Some(parse_num(k, v)?),
                "normalization" => spec.normalization = v.parse()?,
                other => return Err(Error::InvalidInput(format!("unknown state key '{other}'"))),
            }
        }
        spec.family = family.ok_or_else(|| Error::InvalidInput("missing 'family'".into()))?;
        let spec = spec.complete();
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::InvalidInput(format!("cannot parse {key} = '{v}'")))
}

pub fn parse_branch(v: &str) -> Result<Branch> {
    match v.trim() {
        "+" | "plus" | "+1" | "1" => Ok(Branch::Plus),
        "-" | "minus" | "-1" => Ok(Branch::Minus),
        other => Err(Error::InvalidInput(format!("branch must be + or -, got '{other}'"))),
    }
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::InvalidInput(format!("cannot parse complex number '{s}'"));
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(bad());
    }
    if let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) {
        // split at the last sign that is not part of an exponent or leading
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let imag = |x: &str| -> Result<f64> {
            match x {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => x.parse().map_err(|_| bad()),
            }
        };
        return match split {
            Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?)),
            None => Ok(Complex64::new(0.0, imag(body)?)),
        };
    }
    Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), Complex64::new(0.5, 0.25));
        assert_eq!(parse_complex("-1e-3-2i").unwrap(), Complex64::new(-1e-3, -2.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-0.5j").unwrap(), Complex64::new(0.0, -0.5));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn weights_enforced() {
        let s = StateSpec::from_pairs([("family", "spasvs"), ("n", "10"), ("r", "0.5"), ("c1", "0.70710678")]).unwrap();
        assert!((s.weights().1.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        let bad = StateSpec::from_pairs([("family", "spasvs"), ("n", "10"), ("r", "0.5"), ("c1", "0.5"), ("c2", "0.5")]);
        assert!(bad.is_err());
    }

    #[test]
    fn foreign_fields_rejected() {
        assert!(StateSpec::from_pairs([("family", "compass"), ("x0", "4"), ("r", "0.5")]).is_err());
        assert!(StateSpec::from_pairs([("family", "pasvs"), ("n", "3"), ("r", "0.5")]).is_err());
        assert!(StateSpec::from_pairs([("family", "pasvs"), ("n", "3"), ("r", "0.5"), ("branch", "-")]).is_ok());
        assert!(StateSpec::from_pairs([("family", "pasvs"), ("n", "3"), ("r", "0"), ("branch", "+")]).is_err());
        assert!(StateSpec::from_pairs([("family", "nope")]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let s = StateSpec::superposition(Operation::Subtracted, 10, 0.5, 0.6).with_normalization(Normalization::Physical);
        let j = serde_json::to_string(&s).unwrap();
        let back: StateSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
        assert!(j.contains("\"spssvs\""));
        assert!(!j.contains("x0"));
    }
}
