//! Truncated number-basis backend.
//!
//! States are built from the vacuum with matrix exponentials and ladder
//! operators only, so nothing here depends on the closed forms it is used to
//! check. Unnormalised states carry their squared norm explicitly.

mod expm;
mod operators;
mod weyl;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::ln_factorial;
use crate::{Branch, Error, Result};

pub use operators::{OperatorLabel, OperatorMatrix};
pub use weyl::{overlap_grid, position_density, wigner_grid};

pub(crate) use operators::displacement_elements;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Number of top amplitudes whose mass certifies convergence.
pub const TAIL_WINDOW: usize = 4;

/// Threshold on the imaginary part of `tr[ρΔ]/π`.
pub const IMAGINARY_RESIDUE_LIMIT: f64 = 1e-10;

/// Slack allowed outside `[0, 1]` for displaced overlaps.
pub const OVERLAP_SLACK: f64 = 1e-10;

/// How the truncation dimension is chosen and grown.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffPolicy {
    pub initial: usize,
    pub growth_factor: f64,
    /// Bound on the normalised mass of the top [`TAIL_WINDOW`] amplitudes.
    pub tail_tolerance: f64,
    pub max_cutoff: usize,
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        Self { initial: 64, growth_factor: 2.0, tail_tolerance: 1e-20, max_cutoff: 4096 }
    }
}

impl CutoffPolicy {
    /// Default policy with the initial cutoff scaled to `n` applied photons.
    pub fn for_photons(n: usize) -> Self {
        Self { initial: 64.max(4 * n + 32), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.initial < 8 {
            return Err(Error::InvalidInput(format!("cutoff initial {} < 8", self.initial)));
        }
        if self.max_cutoff < self.initial {
            return Err(Error::InvalidInput("max_cutoff below initial cutoff".into()));
        }
        if !(self.growth_factor > 1.0) {
            return Err(Error::InvalidInput("cutoff growth factor must exceed 1".into()));
        }
        if !(self.tail_tolerance > 0.0) {
            return Err(Error::InvalidInput("tail tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Cutoffs tried in order, ending at `max_cutoff`.
    fn schedule(&self) -> Vec<usize> {
        let mut out = vec![self.initial];
        let mut c = self.initial;
        while c < self.max_cutoff {
            c = ((c as f64 * self.growth_factor).ceil() as usize).min(self.max_cutoff).max(c + 1);
            out.push(c);
        }
        out
    }

    /// Runs `build` on growing cutoffs until the result's tail is within tolerance.
    fn converge<F>(&self, mut build: F) -> Result<FockVector>
    where
        F: FnMut(usize) -> Result<FockVector>,
    {
        self.validate()?;
        let mut last = (self.initial, f64::INFINITY);
        for cutoff in self.schedule() {
            let mut v = build(cutoff)?;
            let tail = v.tail_mass();
            if tail <= self.tail_tolerance {
                v.tail_tolerance = self.tail_tolerance;
                return Ok(v);
            }
            log::debug!("cutoff {cutoff}: tail {tail:.3e}, growing");
            last = (cutoff, tail);
        }
        Err(Error::CutoffExhausted { cutoff: last.0, tail: last.1 })
    }
}

/// A (possibly unnormalised) state in the truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amplitudes: Vec<Complex64>,
    norm_sq: f64,
    /// Tail bound this vector was certified against; infinite if never certified.
    tail_tolerance: f64,
}

impl FockVector {
    /// Wraps raw amplitudes; the result is not marked converged.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        let norm_sq = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        Self { amplitudes, norm_sq, tail_tolerance: f64::INFINITY }
    }

    pub fn number_state(k: usize, cutoff: usize) -> Self {
        let mut amps = vec![ZERO; cutoff.max(k + 1)];
        amps[k] = Complex64::new(1.0, 0.0);
        let mut v = Self::from_amplitudes(amps);
        v.tail_tolerance = 0.0;
        v
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::number_state(0, cutoff)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn is_zero(&self) -> bool {
        self.norm_sq == 0.0
    }

    /// Normalised mass of the top [`TAIL_WINDOW`] amplitudes.
    pub fn tail_mass(&self) -> f64 {
        if self.norm_sq == 0.0 {
            return 0.0;
        }
        let start = self.cutoff().saturating_sub(TAIL_WINDOW);
        self.amplitudes[start..].iter().map(|z| z.norm_sqr()).sum::<f64>() / self.norm_sq
    }

    pub fn is_converged(&self) -> bool {
        self.tail_mass() <= self.tail_tolerance
    }

    /// Unit-norm copy.
    pub fn normalized(&self) -> Result<FockVector> {
        if !(self.norm_sq > 0.0) || !self.norm_sq.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / self.norm_sq.sqrt();
        let mut v = Self::from_amplitudes(self.amplitudes.iter().map(|z| z * s).collect());
        v.tail_tolerance = self.tail_tolerance;
        Ok(v)
    }

    /// Zero-padded copy with at least `cutoff` levels.
    pub fn padded(&self, cutoff: usize) -> FockVector {
        let mut v = self.clone();
        if cutoff > v.amplitudes.len() {
            v.amplitudes.resize(cutoff, ZERO);
        }
        v
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    fn with_tolerance_of(mut self, src: &FockVector) -> Self {
        self.tail_tolerance = src.tail_tolerance;
        self
    }
}

/// Mean excitation number `⟨a†a⟩` of a normalised or unnormalised state.
pub trait MeanPhoton {
    fn mean_photon(&self) -> f64;
}

impl MeanPhoton for FockVector {
    fn mean_photon(&self) -> f64 {
        if self.norm_sq == 0.0 {
            return 0.0;
        }
        self.amplitudes.iter().enumerate().map(|(k, z)| k as f64 * z.norm_sqr()).sum::<f64>()
            / self.norm_sq
    }
}

impl MeanPhoton for DensityMatrix {
    fn mean_photon(&self) -> f64 {
        self.ensemble.iter().map(|(w, v)| w * v.mean_photon()).sum()
    }
}

/// `|α⟩ = e^{−|α|²/2} Σ αᵏ/√k! |k⟩`, truncated where the tail is negligible.
pub fn coherent_state(alpha: Complex64, policy: &CutoffPolicy) -> Result<FockVector> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite coherent amplitude".into()));
    }
    let policy = CutoffPolicy {
        initial: policy.initial.max((2.0 * alpha.norm_sqr()) as usize + 16),
        ..*policy
    };
    policy.converge(|cutoff| {
        let mut amps = Vec::with_capacity(cutoff);
        let mut a = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for k in 0..cutoff {
            amps.push(a);
            a *= alpha / ((k + 1) as f64).sqrt();
        }
        Ok(FockVector::from_amplitudes(amps))
    })
}

/// `S(±r)|0⟩` from the truncated exponential of `±(r/2)(a†² − a²)`.
pub fn squeezed_vacuum(r: f64, branch: Branch, policy: &CutoffPolicy) -> Result<FockVector> {
    check_squeeze(r)?;
    policy.converge(|cutoff| Ok(squeezed_vacuum_at(branch.sign() * r, cutoff)))
}

fn check_squeeze(r: f64) -> Result<()> {
    if !r.is_finite() || r.abs() > 3.0 {
        return Err(Error::InvalidInput(format!("squeeze parameter {r} outside |r| ≤ 3")));
    }
    Ok(())
}

fn squeezed_vacuum_at(signed_r: f64, cutoff: usize) -> FockVector {
    let half = 0.5 * signed_r;
    let weights: Vec<f64> = (0..cutoff.saturating_sub(2))
        .map(|k| half * (((k + 1) * (k + 2)) as f64).sqrt())
        .collect();
    let apply = |v: &[Complex64], out: &mut [Complex64]| {
        for (k, w) in weights.iter().enumerate() {
            out[k + 2] += v[k] * *w;
            out[k] -= v[k + 2] * *w;
        }
    };
    let bound = 2.0 * weights.last().copied().unwrap_or(0.0).abs();
    let mut v = vec![ZERO; cutoff];
    v[0] = Complex64::new(1.0, 0.0);
    let out = expm::expm_action(apply, bound, &v);
    FockVector::from_amplitudes(out)
        .normalized()
        .expect("unitary evolution of the vacuum has unit norm")
}

/// `a†ⁿ|state⟩`, unnormalised; the cutoff grows by `n`.
pub fn apply_creation(state: &FockVector, n: usize) -> FockVector {
    let c = state.cutoff();
    let mut amps = vec![ZERO; c + n];
    for (k, z) in state.amplitudes.iter().enumerate() {
        let w = (0.5 * (ln_factorial(k + n) - ln_factorial(k))).exp();
        amps[k + n] = z * w;
    }
    FockVector::from_amplitudes(amps).with_tolerance_of(state)
}

/// `aⁿ|state⟩`, unnormalised; the top `n` levels carry no information and are dropped.
pub fn apply_annihilation(state: &FockVector, n: usize) -> FockVector {
    let c = state.cutoff();
    let len = c.saturating_sub(n).max(1);
    let mut amps = vec![ZERO; len];
    for (k, slot) in amps.iter_mut().enumerate() {
        if let Some(z) = state.amplitudes.get(k + n) {
            let w = (0.5 * (ln_factorial(k + n) - ln_factorial(k))).exp();
            *slot = z * w;
        }
    }
    FockVector::from_amplitudes(amps).with_tolerance_of(state)
}

/// `a†ⁿ S(±r)|0⟩` with the cutoff grown until the result itself is converged.
pub fn photon_added_squeezed(
    n: usize,
    r: f64,
    branch: Branch,
    policy: &CutoffPolicy,
) -> Result<FockVector> {
    check_squeeze(r)?;
    policy.converge(|cutoff| {
        Ok(apply_creation(&squeezed_vacuum_at(branch.sign() * r, cutoff.saturating_sub(n).max(8)), n))
    })
}

/// `aⁿ S(±r)|0⟩` with the cutoff grown until the result itself is converged.
pub fn photon_subtracted_squeezed(
    n: usize,
    r: f64,
    branch: Branch,
    policy: &CutoffPolicy,
) -> Result<FockVector> {
    check_squeeze(r)?;
    policy.converge(|cutoff| {
        Ok(apply_annihilation(&squeezed_vacuum_at(branch.sign() * r, cutoff + n), n))
    })
}

/// Unnormalised sum of four coherent states at `±x0/√2` and `±i x0/√2`.
pub fn compass_state(x0: f64, policy: &CutoffPolicy) -> Result<FockVector> {
    let a = x0 * std::f64::consts::FRAC_1_SQRT_2;
    let points = [
        Complex64::new(a, 0.0),
        Complex64::new(-a, 0.0),
        Complex64::new(0.0, a),
        Complex64::new(0.0, -a),
    ];
    let mut acc: Option<FockVector> = None;
    for p in points {
        let v = coherent_state(p, policy)?;
        acc = Some(match acc {
            None => v,
            Some(s) => superpose(Complex64::new(1.0, 0.0), &s, Complex64::new(1.0, 0.0), &v)?,
        });
    }
    Ok(acc.expect("four points"))
}

/// `c1|s1⟩ + c2|s2⟩` on the larger of the two cutoffs.
pub fn superpose(c1: Complex64, s1: &FockVector, c2: Complex64, s2: &FockVector) -> Result<FockVector> {
    let cutoff = s1.cutoff().max(s2.cutoff());
    let (a, b) = (s1.padded(cutoff), s2.padded(cutoff));
    let amps: Vec<Complex64> = a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| c1 * x + c2 * y).collect();
    let mut v = FockVector::from_amplitudes(amps);
    let scale = c1.norm_sqr() * s1.norm_sq + c2.norm_sqr() * s2.norm_sq;
    if v.norm_sq <= 1e-24 * scale || v.norm_sq == 0.0 {
        return Err(Error::ZeroNorm);
    }
    v.tail_tolerance = s1.tail_tolerance.max(s2.tail_tolerance);
    Ok(v)
}

/// A density matrix stored as a weighted ensemble of unit vectors.
///
/// Every observable used here is bilinear in `ρ`, so working with the
/// ensemble avoids materialising `cutoff²` entries for large cutoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    ensemble: Vec<(f64, FockVector)>,
    cutoff: usize,
}

impl DensityMatrix {
    pub fn from_pure(state: &FockVector) -> Result<Self> {
        let v = state.normalized()?;
        Ok(Self { cutoff: v.cutoff(), ensemble: vec![(1.0, v)] })
    }

    /// Decomposes a Hermitian matrix; eigenvalues below `1e-15` of the trace are dropped.
    pub fn from_entries(entries: DMatrix<Complex64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::InvalidInput("density matrix must be square".into()));
        }
        let herm = (&entries - entries.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::InvalidInput(format!("matrix not Hermitian ({herm:.3e})")));
        }
        let trace: f64 = (0..n).map(|k| entries[(k, k)].re).sum();
        if !(trace > 0.0) {
            return Err(Error::ZeroNorm);
        }
        let eig = SymmetricEigen::new(entries);
        let mut ensemble = Vec::new();
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > 1e-15 * trace {
                let v = FockVector::from_amplitudes(eig.eigenvectors.column(k).iter().copied().collect());
                ensemble.push((lam / trace, v.normalized()?));
            }
        }
        Ok(Self { ensemble, cutoff: n })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn ensemble(&self) -> &[(f64, FockVector)] {
        &self.ensemble
    }

    /// Dense `cutoff × cutoff` entries.
    pub fn entries(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.cutoff, self.cutoff);
        for (w, v) in &self.ensemble {
            let a = v.amplitudes();
            for j in 0..a.len() {
                for i in 0..a.len() {
                    m[(i, j)] += a[i] * a[j].conj() * *w;
                }
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.ensemble.iter().map(|(w, v)| w * v.norm_sq()).sum()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        let mut acc = 0.0;
        for (wi, vi) in &self.ensemble {
            for (wj, vj) in &self.ensemble {
                acc += wi * wj * vi.inner(vj).norm_sqr();
            }
        }
        acc
    }

    pub fn is_converged(&self) -> bool {
        self.ensemble.iter().all(|(_, v)| v.is_converged())
    }
}

/// `w1|s1⟩⟨s1| + w2|s2⟩⟨s2|` with sources and weights normalised.
pub fn mix(w1: f64, s1: &FockVector, w2: f64, s2: &FockVector) -> Result<DensityMatrix> {
    if !(w1 >= 0.0 && w2 >= 0.0 && w1 + w2 > 0.0) {
        return Err(Error::InvalidInput(format!("mixture weights ({w1}, {w2})")));
    }
    let total = w1 + w2;
    let cutoff = s1.cutoff().max(s2.cutoff());
    let mut ensemble = Vec::with_capacity(2);
    for (w, s) in [(w1, s1), (w2, s2)] {
        if w > 0.0 {
            ensemble.push((w / total, s.normalized()?.padded(cutoff)));
        }
    }
    Ok(DensityMatrix { ensemble, cutoff })
}

/// Truncated `D(δα)`; see [`OperatorMatrix::displacement`].
pub fn displacement_operator(delta_alpha: Complex64, cutoff: usize) -> OperatorMatrix {
    OperatorMatrix::displacement(delta_alpha, cutoff)
}

/// `tr[ρ Δ(α)]/π` with `Δ(α) = 2 D(α) Π D†(α)`.
pub fn wigner_point(rho: &DensityMatrix, alpha: Complex64) -> Result<f64> {
    let kernel = OperatorMatrix::displaced_parity(alpha, rho.cutoff);
    let k = kernel.entries();
    let mut acc = ZERO;
    for (w, v) in &rho.ensemble {
        acc += quadratic_form(k, v.amplitudes()) * *w;
    }
    acc /= std::f64::consts::PI;
    if acc.im.abs() > IMAGINARY_RESIDUE_LIMIT {
        return Err(Error::ImaginaryResidue { residue: acc.im.abs() });
    }
    Ok(acc.re)
}

/// `tr{ρ D(δα) ρ D†(δα)}`.
pub fn overlap_displaced(rho: &DensityMatrix, delta_alpha: Complex64) -> Result<f64> {
    let d = displacement_elements(delta_alpha, rho.cutoff);
    let mut acc = 0.0;
    for (wi, vi) in &rho.ensemble {
        let dv = matvec(&d, vi.amplitudes());
        for (wj, vj) in &rho.ensemble {
            let m: Complex64 = vj.amplitudes().iter().zip(&dv).map(|(a, b)| a.conj() * b).sum();
            acc += wi * wj * m.norm_sqr();
        }
    }
    if !(-OVERLAP_SLACK..=1.0 + OVERLAP_SLACK).contains(&acc) {
        return Err(Error::OverlapOutOfRange { value: acc });
    }
    Ok(acc)
}

/// `⟨ψ|D(δα)|ψ⟩` for an unnormalised vector.
pub fn displaced_amplitude(state: &FockVector, delta_alpha: Complex64) -> Complex64 {
    let d = displacement_elements(delta_alpha, state.cutoff());
    quadratic_form(&d, state.amplitudes())
}

fn matvec(m: &DMatrix<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    let n = v.len();
    let mut out = vec![ZERO; n];
    for (j, vj) in v.iter().enumerate() {
        if *vj == ZERO {
            continue;
        }
        let col = m.column(j);
        for i in 0..n {
            out[i] += col[i] * vj;
        }
    }
    out
}

fn quadratic_form(m: &DMatrix<Complex64>, v: &[Complex64]) -> Complex64 {
    let mv = matvec(m, v);
    v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
}
