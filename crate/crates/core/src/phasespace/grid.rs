use serde::{Deserialize, Serialize};

use super::spec::StateSpec;
use super::{Backend, Quantity};
use crate::{Error, Result};

/// Origin magnitudes below this cannot serve as a normalisation reference.
pub const DEGENERATE_ORIGIN: f64 = 1e-300;

/// Uniform tensor grid with nodes `min + (max − min)·i/(n − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, nx: usize, p_min: f64, p_max: f64, np: usize) -> Result<Self> {
        let g = Self { x_min, x_max, nx, p_min, p_max, np };
        g.validate()?;
        Ok(g)
    }

    /// `[−half, half]²` with `n` nodes per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new(-half, half, n, -half, half, n)
    }

    /// `[−6, 6]²` at 241², the Wigner default.
    pub fn wigner_default() -> Self {
        Self { x_min: -6.0, x_max: 6.0, nx: 241, p_min: -6.0, p_max: 6.0, np: 241 }
    }

    /// `[−1.5, 1.5]²` at 121², the overlap default.
    pub fn overlap_default() -> Self {
        Self { x_min: -1.5, x_max: 1.5, nx: 121, p_min: -1.5, p_max: 1.5, np: 121 }
    }

    pub fn validate(&self) -> Result<()> {
        let axis = |lo: f64, hi: f64, n: usize, name: &str| -> Result<()> {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidInput(format!("{name} range [{lo}, {hi}] is empty")));
            }
            if n < 2 {
                return Err(Error::InvalidInput(format!("{name} needs at least 2 nodes, got {n}")));
            }
            Ok(())
        };
        axis(self.x_min, self.x_max, self.nx, "x")?;
        axis(self.p_min, self.p_max, self.np, "p")
    }

    fn node(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        Self::node(self.x_min, self.x_max, self.nx, i)
    }

    pub fn p(&self, j: usize) -> f64 {
        Self::node(self.p_min, self.p_max, self.np, j)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.np).map(|j| self.p(j)).collect()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step_x(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn step_p(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn contains_origin(&self) -> bool {
        self.x_min <= 0.0 && 0.0 <= self.x_max && self.p_min <= 0.0 && 0.0 <= self.p_max
    }

    /// Indices of the node sitting exactly on the origin, if any.
    pub fn origin_index(&self) -> Option<(usize, usize)> {
        let ix = (0..self.nx).find(|&i| self.x(i) == 0.0)?;
        let ip = (0..self.np).find(|&j| self.p(j) == 0.0)?;
        Some((ix, ip))
    }
}

/// Where a field came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub spec: StateSpec,
    pub backend: Backend,
    pub quantity: Quantity,
    /// Fock cutoff used by the oracle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
}

/// Values on a grid, row-major with `x` slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    /// Value evaluated directly at the origin, before any normalisation.
    pub origin_value: f64,
    pub normalized: bool,
    pub provenance: Provenance,
}

impl ScalarField {
    pub fn at(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.grid.np + ip]
    }

    pub fn peak_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Iterates over `(x, p, value)`.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let np = self.grid.np;
        self.values.iter().enumerate().map(move |(k, v)| (self.grid.x(k / np), self.grid.p(k % np), *v))
    }
}

/// Divides by `|origin_value|`; applying it twice changes nothing.
pub fn normalize_origin(field: &ScalarField) -> Result<ScalarField> {
    if field.normalized {
        return Ok(field.clone());
    }
    let scale = field.origin_value.abs();
    if !(scale >= DEGENERATE_ORIGIN) {
        return Err(Error::DegenerateNormalization(field.origin_value));
    }
    let mut out = field.clone();
    out.values.iter_mut().for_each(|v| *v /= scale);
    out.normalized = true;
    Ok(out)
}

fn trapezoid(values: impl Iterator<Item = f64>, n: usize, step: f64) -> f64 {
    values
        .enumerate()
        .map(|(k, v)| if k == 0 || k + 1 == n { 0.5 * v } else { v })
        .sum::<f64>()
        * step
}

/// Axis along which [`marginal`] keeps its coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarginalAxis {
    /// `½ ∫ W dp` as a function of `x`.
    X,
    /// `½ ∫ W dx` as a function of `p`.
    P,
}

/// Quadrature distribution; for a physical Wigner field this is `|ψ(x)|²` (or `|ψ̃(p)|²`).
pub fn marginal(field: &ScalarField, axis: MarginalAxis) -> Vec<f64> {
    let g = &field.grid;
    match axis {
        MarginalAxis::X => (0..g.nx)
            .map(|i| 0.5 * trapezoid((0..g.np).map(|j| field.at(i, j)), g.np, g.step_p()))
            .collect(),
        MarginalAxis::P => (0..g.np)
            .map(|j| 0.5 * trapezoid((0..g.nx).map(|i| field.at(i, j)), g.nx, g.step_x()))
            .collect(),
    }
}

/// `∫ f d²α = ½ ∫∫ f dx dp` by the trapezoid rule.
pub fn integrate(field: &ScalarField) -> f64 {
    let g = &field.grid;
    let rows = marginal(field, MarginalAxis::X);
    trapezoid(rows.into_iter(), g.nx, g.step_x())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualStats {
    pub max_abs: f64,
    /// `max |a − b| / max(|a|, |b|)`, the peak taken over both fields.
    pub max_rel_to_peak: f64,
    pub rms: f64,
}

pub fn residual_stats(a: &ScalarField, b: &ScalarField) -> Result<ResidualStats> {
    if a.grid != b.grid || a.values.len() != b.values.len() {
        return Err(Error::GridMismatch);
    }
    let mut max_abs = 0.0f64;
    let mut sq = 0.0;
    for (x, y) in a.values.iter().zip(&b.values) {
        let d = (x - y).abs();
        max_abs = max_abs.max(d);
        sq += d * d;
    }
    let peak = a.peak_abs().max(b.peak_abs());
    Ok(ResidualStats {
        max_abs,
        max_rel_to_peak: if peak > 0.0 { max_abs / peak } else { max_abs },
        rms: (sq / a.values.len().max(1) as f64).sqrt(),
    })
}
