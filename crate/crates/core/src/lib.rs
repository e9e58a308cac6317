//! Phase-space observables of photon-added and photon-subtracted squeezed-vacuum
//! states, their superpositions and mixtures, and the Zurek compass state.
//!
//! Every observable is available from two independent backends:
//!
//! * [`closedform`] evaluates Hermite-polynomial sums in log space.
//! * [`fock`] builds the states in a truncated number basis from matrix
//!   exponentials and ladder operators and evaluates the same observables
//!   directly from their definitions.
//!
//! [`phasespace`] samples either backend on grids and [`metrics`] extracts
//! central-tile extents, sensitivity radii and photon statistics.
//!
//! Conventions: `α = (x + i p)/√2`, Wigner values are `tr[ρ Δ(α)]/π` with
//! `Δ(α) = 2 D(α) Π D†(α)`, and displacements are `δα = (δx + i δp)/√2`.

pub mod closedform;
mod error;
pub mod fock;
pub mod metrics;
pub mod phasespace;
mod special;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Library version recorded in output metadata.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

use serde::{Deserialize, Serialize};

/// Sign of the squeezing parameter, `S(±r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }
}

/// Photon addition (`a†ⁿ`) or subtraction (`aⁿ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Added,
    Subtracted,
}

/// Converts phase-space coordinates to the complex amplitude `α = (x + i p)/√2`.
pub fn alpha_from_xp(x: f64, p: f64) -> Complex64 {
    Complex64::new(x, p) * std::f64::consts::FRAC_1_SQRT_2
}
