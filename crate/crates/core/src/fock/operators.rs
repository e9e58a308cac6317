use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::expm::expm_dense;
use super::FockVector;
use crate::special::ln_factorial;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// What an [`OperatorMatrix`] represents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OperatorLabel {
    Annihilation,
    Creation,
    Parity,
    Displacement(Complex64),
    Squeeze(f64),
    DisplacedParity(Complex64),
}

/// A `cutoff × cutoff` truncation of a single-mode operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    label: OperatorLabel,
}

impl OperatorMatrix {
    pub fn annihilation(cutoff: usize) -> Self {
        let mut m = DMatrix::zeros(cutoff, cutoff);
        for k in 1..cutoff {
            m[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
        }
        Self { entries: m, label: OperatorLabel::Annihilation }
    }

    pub fn creation(cutoff: usize) -> Self {
        let mut m = DMatrix::zeros(cutoff, cutoff);
        for k in 1..cutoff {
            m[(k, k - 1)] = Complex64::new((k as f64).sqrt(), 0.0);
        }
        Self { entries: m, label: OperatorLabel::Creation }
    }

    /// `(−1)^{a†a}`.
    pub fn parity(cutoff: usize) -> Self {
        let m = DMatrix::from_fn(cutoff, cutoff, |i, j| {
            if i != j {
                ZERO
            } else if i % 2 == 0 {
                ONE
            } else {
                -ONE
            }
        });
        Self { entries: m, label: OperatorLabel::Parity }
    }

    /// Truncated matrix exponential of `δα a† − δα* a`.
    pub fn displacement(delta_alpha: Complex64, cutoff: usize) -> Self {
        if delta_alpha.norm() * (cutoff as f64).sqrt() > 0.5 * cutoff as f64 {
            log::warn!(
                "displacement |δα| = {} is not small against cutoff {}; high rows are inaccurate",
                delta_alpha.norm(),
                cutoff
            );
        }
        let mut g = DMatrix::zeros(cutoff, cutoff);
        for k in 1..cutoff {
            let w = (k as f64).sqrt();
            g[(k, k - 1)] = delta_alpha * w;
            g[(k - 1, k)] = -delta_alpha.conj() * w;
        }
        Self { entries: expm_dense(&g), label: OperatorLabel::Displacement(delta_alpha) }
    }

    /// Exact matrix elements `⟨m|D(β)|n⟩` of the untruncated displacement,
    /// restricted to `m, n < cutoff`.
    pub fn displacement_exact(beta: Complex64, cutoff: usize) -> Self {
        Self {
            entries: displacement_elements(beta, cutoff),
            label: OperatorLabel::Displacement(beta),
        }
    }

    /// Truncated matrix exponential of `(r/2)(a†² − a²)`; negative `r` gives `S(−|r|)`.
    pub fn squeeze(r: f64, cutoff: usize) -> Self {
        let mut g = DMatrix::zeros(cutoff, cutoff);
        for k in 0..cutoff.saturating_sub(2) {
            let w = 0.5 * r * (((k + 1) * (k + 2)) as f64).sqrt();
            g[(k + 2, k)] = Complex64::new(w, 0.0);
            g[(k, k + 2)] = Complex64::new(-w, 0.0);
        }
        Self { entries: expm_dense(&g), label: OperatorLabel::Squeeze(r) }
    }

    /// `Δ(α) = 2 D(α) Π D†(α)`, built as `2 D(2α) Π` from exact elements.
    pub fn displaced_parity(alpha: Complex64, cutoff: usize) -> Self {
        let mut m = displacement_elements(alpha * 2.0, cutoff);
        for (j, mut col) in m.column_iter_mut().enumerate() {
            let s = if j % 2 == 0 { 2.0 } else { -2.0 };
            col.iter_mut().for_each(|z| *z *= s);
        }
        Self { entries: m, label: OperatorLabel::DisplacedParity(alpha) }
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn label(&self) -> OperatorLabel {
        self.label
    }

    pub fn cutoff(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> DMatrix<Complex64> {
        self.entries.adjoint()
    }

    /// Applies the operator to a state of equal or smaller cutoff.
    pub fn apply(&self, state: &FockVector) -> FockVector {
        let v = DVector::from_vec(state.padded(self.cutoff()).amplitudes().to_vec());
        FockVector::from_amplitudes((&self.entries * v).data.into())
    }

    /// Largest deviation of `M† M` from the identity on indices `0..block`.
    pub fn unitarity_deviation(&self, block: usize) -> f64 {
        let prod = self.entries.adjoint() * &self.entries;
        max_identity_deviation(&prod, block)
    }
}

pub(crate) fn max_identity_deviation(m: &DMatrix<Complex64>, block: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..block.min(m.nrows()) {
        for j in 0..block.min(m.ncols()) {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

/// `⟨m|D(β)|n⟩` for `m, n < dim` from generalised Laguerre polynomials.
///
/// For `m = n + k`, the element is `β^k e^{−|β|²/2} √(n!/m!) L_n^{(k)}(|β|²)`;
/// elements with `m < n` follow from `⟨m|D(β)|n⟩ = ⟨n|D(−β)|m⟩*`. The
/// normalised recurrence below keeps `√(n! k!/(n+k)!) L_n^{(k)}` and folds the
/// remaining scale into a per-diagonal prefactor computed in log space.
pub(crate) fn displacement_elements(beta: Complex64, dim: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::zeros(dim, dim);
    if beta.norm() == 0.0 {
        for k in 0..dim {
            out[(k, k)] = ONE;
        }
        return out;
    }
    let x = beta.norm_sqr();
    let ln_abs = beta.norm().ln();
    let unit = beta / beta.norm();
    let neg_unit_conj = -unit.conj();

    let mut g = vec![0.0f64; dim];
    for k in 0..dim {
        let len = dim - k;
        laguerre_normalised(k, x, &mut g[..len]);
        let mag = (k as f64 * ln_abs - 0.5 * ln_factorial(k) - 0.5 * x).exp();
        let lower = unit.powu(k as u32) * mag;
        let upper = neg_unit_conj.powu(k as u32) * mag;
        for (n, gn) in g[..len].iter().enumerate() {
            out[(n + k, n)] = lower * *gn;
            if k > 0 {
                out[(n, n + k)] = upper * *gn;
            }
        }
    }
    out
}

/// Fills `g[j] = √(j! k!/(j+k)!) L_j^{(k)}(x)`.
fn laguerre_normalised(k: usize, x: f64, g: &mut [f64]) {
    if g.is_empty() {
        return;
    }
    let kf = k as f64;
    g[0] = 1.0;
    if g.len() == 1 {
        return;
    }
    g[1] = (1.0 + kf - x) / (kf + 1.0).sqrt();
    for j in 1..g.len() - 1 {
        let jf = j as f64;
        g[j + 1] = ((2.0 * jf + 1.0 + kf - x) * g[j] - (jf * (jf + kf)).sqrt() * g[j - 1])
            / ((jf + 1.0) * (jf + 1.0 + kf)).sqrt();
    }
}
