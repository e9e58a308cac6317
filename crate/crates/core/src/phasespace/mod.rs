//! State descriptions, sampling grids and fields from either backend.

mod eval;
mod grid;
mod spec;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

pub use eval::{default_policy, evaluate_field, evaluate_model, oracle_state, ClosedFormModel, Model, OracleModel};
pub use grid::{
    integrate, marginal, normalize_origin, residual_stats, GridSpec, MarginalAxis, Provenance, ResidualStats,
    ScalarField, DEGENERATE_ORIGIN,
};
pub use spec::{parse_branch, parse_complex, Family, Normalization, StateSpec, WEIGHT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    ClosedForm,
    Oracle,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::ClosedForm => "closed_form",
            Backend::Oracle => "oracle",
        })
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "closed_form" | "closedform" | "closed" => Ok(Backend::ClosedForm),
            "oracle" | "fock" => Ok(Backend::Oracle),
            other => Err(Error::InvalidInput(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Wigner,
    Overlap,
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quantity::Wigner => "wigner",
            Quantity::Overlap => "overlap",
        })
    }
}

/// Ray direction through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    X,
    P,
    Diagonal,
    AntiDiagonal,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::X, Direction::P, Direction::Diagonal, Direction::AntiDiagonal];

    /// Unit vector `(x, p)`.
    pub fn unit(self) -> (f64, f64) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            Direction::X => (1.0, 0.0),
            Direction::P => (0.0, 1.0),
            Direction::Diagonal => (h, h),
            Direction::AntiDiagonal => (-h, h),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::X => "x",
            Direction::P => "p",
            Direction::Diagonal => "diagonal",
            Direction::AntiDiagonal => "anti_diagonal",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Direction::ALL
            .into_iter()
            .find(|d| d.name() == key || (key == "antidiagonal" && *d == Direction::AntiDiagonal))
            .ok_or_else(|| Error::InvalidInput(format!("unknown direction '{s}'")))
    }
}
