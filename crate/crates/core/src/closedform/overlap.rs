//! Displacement sensitivity `tr{ρ D(δα) ρ D†(δα)}`.

use num_complex::Complex64;

use super::frames::{DisplacementFrame, SqueezeFrame};
use super::hermite::{hermite_pair_sum, LogComplex};
use super::norms::branch_norm_sq;
use crate::{Branch, Operation, Result};

/// `e^{−|δα|²}`.
pub fn overlap_coherent(delta_alpha: Complex64) -> f64 {
    (-delta_alpha.norm_sqr()).exp()
}

/// Log form of `⟨ψ±|D(δα)|ψ±⟩` for the unnormalised branch state.
pub(crate) fn overlap_term_log(
    op: Operation,
    n: usize,
    frame: &SqueezeFrame,
    branch: Branch,
    d: &DisplacementFrame,
) -> Result<LogComplex> {
    frame.require_regular(n)?;
    let eta = d.eta(branch);
    let gauss = -0.5 * eta.norm_sqr();
    if n == 0 {
        return Ok(LogComplex::exp_real(gauss));
    }
    let s = branch.sign();
    let c = frame.hyperbolic_ratio(op);
    let theta = d.theta(op, branch);
    let theta_tilde = -Complex64::i() * Complex64::new(0.5 * s * c, 0.0).sqrt() * eta.conj();
    let sum = hermite_pair_sum(n, Complex64::new(-2.0 * s * c, 0.0), theta, theta_tilde)?;
    let nf = n as f64;
    let pre = LogComplex::new(
        gauss + nf * frame.sinh_2r.ln() - nf * 4f64.ln(),
        if s > 0.0 && n % 2 == 1 { std::f64::consts::PI } else { 0.0 },
    );
    Ok(pre * sum)
}

/// `⟨ψ±|D(δα)|ψ±⟩` with `ψ± = a†ⁿ S(±r)|0⟩`.
pub fn overlap_term_pasvs(n: usize, frame: &SqueezeFrame, branch: Branch, d: &DisplacementFrame) -> Result<Complex64> {
    Ok(overlap_term_log(Operation::Added, n, frame, branch, d)?.to_complex())
}

/// `⟨ψ±|D(δα)|ψ±⟩` with `ψ± = aⁿ S(±r)|0⟩`.
pub fn overlap_term_pssvs(n: usize, frame: &SqueezeFrame, branch: Branch, d: &DisplacementFrame) -> Result<Complex64> {
    Ok(overlap_term_log(Operation::Subtracted, n, frame, branch, d)?.to_complex())
}

/// Normalised branch amplitudes `⟨ψ±|D|ψ±⟩ / ‖ψ±‖²`.
fn normalized_terms(
    op: Operation,
    n: usize,
    frame: &SqueezeFrame,
    d: &DisplacementFrame,
    norm: LogComplex,
) -> Result<(Complex64, Complex64)> {
    let plus = (overlap_term_log(op, n, frame, Branch::Plus, d)? / norm).to_complex();
    let minus = (overlap_term_log(op, n, frame, Branch::Minus, d)? / norm).to_complex();
    Ok((plus, minus))
}

/// Precomputes the branch norm so maps need it once.
#[derive(Debug, Clone, Copy)]
pub struct OverlapKernel {
    op: Operation,
    n: usize,
    frame: SqueezeFrame,
    norm: LogComplex,
}

impl OverlapKernel {
    pub fn new(op: Operation, n: usize, frame: SqueezeFrame) -> Result<Self> {
        frame.require_regular(n)?;
        Ok(Self { op, n, frame, norm: branch_norm_sq(op, n, &frame)? })
    }

    /// `|(|c1|² T₊ + |c2|² T₋)|² / (|c1|² + |c2|²)²`, cross terms between branches dropped.
    pub fn superposition(&self, c1: Complex64, c2: Complex64, d: &DisplacementFrame) -> Result<f64> {
        let (tp, tm) = normalized_terms(self.op, self.n, &self.frame, d, self.norm)?;
        let (w1, w2) = (c1.norm_sqr(), c2.norm_sqr());
        Ok((tp * w1 + tm * w2).norm_sqr() / (w1 + w2).powi(2))
    }

    /// `(|c1|⁴ |T₊|² + |c2|⁴ |T₋|²) / (|c1|⁴ + |c2|⁴)`.
    pub fn mixture(&self, c1: Complex64, c2: Complex64, d: &DisplacementFrame) -> Result<f64> {
        let (tp, tm) = normalized_terms(self.op, self.n, &self.frame, d, self.norm)?;
        let (w1, w2) = (c1.norm_sqr().powi(2), c2.norm_sqr().powi(2));
        Ok((w1 * tp.norm_sqr() + w2 * tm.norm_sqr()) / (w1 + w2))
    }
}

/// Origin-normalised overlap of the branch superposition `c1 ψ+ + c2 ψ−`.
pub fn overlap_superposition(
    op: Operation,
    n: usize,
    frame: &SqueezeFrame,
    c1: Complex64,
    c2: Complex64,
    d: &DisplacementFrame,
) -> Result<f64> {
    OverlapKernel::new(op, n, *frame)?.superposition(c1, c2, d)
}

/// Origin-normalised overlap of the branch mixture `|c1|² ρ₊ + |c2|² ρ₋`.
pub fn overlap_mixture(
    op: Operation,
    n: usize,
    frame: &SqueezeFrame,
    c1: Complex64,
    c2: Complex64,
    d: &DisplacementFrame,
) -> Result<f64> {
    OverlapKernel::new(op, n, *frame)?.mixture(c1, c2, d)
}
