use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{normalize_origin, GridSpec, Provenance, ScalarField};
use super::spec::{Family, Normalization, StateSpec};
use super::{Backend, Quantity};
use crate::closedform::hermite::LogComplex;
use crate::closedform::overlap::overlap_term_log;
use crate::closedform::wigner::wigner_branch_log;
use crate::closedform::{
    branch_norm_sq, compass_norm_sq, overlap_coherent, overlap_compass, superposition_cross, superposition_norm_sq,
    wigner_coherent, wigner_compass, wigner_mixture, DisplacementFrame, OverlapKernel, PhasePointMap, SqueezeFrame,
};
use crate::fock::{self, CutoffPolicy, DensityMatrix};
use crate::{alpha_from_xp, Branch, Error, Operation, Result};

#[derive(Debug, Clone, Copy)]
enum Closed {
    Coherent {
        x0: f64,
    },
    Compass {
        x0: f64,
        norm: f64,
    },
    Single {
        op: Operation,
        n: usize,
        frame: SqueezeFrame,
        branch: Branch,
        norm: LogComplex,
    },
    Pair {
        op: Operation,
        n: usize,
        frame: SqueezeFrame,
        c1: Complex64,
        c2: Complex64,
        mixed: bool,
        norm: f64,
        kernel: OverlapKernel,
    },
}

/// Closed-form evaluator with the normalisation constants precomputed.
#[derive(Debug, Clone, Copy)]
pub struct ClosedFormModel(Closed);

impl ClosedFormModel {
    pub fn new(spec: &StateSpec) -> Result<Self> {
        spec.validate()?;
        let inner = match spec.family {
            Family::Coherent => Closed::Coherent { x0: spec.separation() },
            Family::Compass => Closed::Compass { x0: spec.separation(), norm: compass_norm_sq(spec.separation()) },
            Family::Svs | Family::Pasvs | Family::Pssvs => {
                let op = spec.family.operation().unwrap_or(Operation::Added);
                let n = spec.photons();
                let frame = SqueezeFrame::new(spec.squeeze())?;
                frame.require_regular(n)?;
                Closed::Single { op, n, frame, branch: spec.branch_or_plus(), norm: branch_norm_sq(op, n, &frame)? }
            }
            Family::Spasvs | Family::Spssvs | Family::MixPa | Family::MixPs => {
                let op = spec.family.operation().expect("weighted families carry an operation");
                let n = spec.photons();
                let frame = SqueezeFrame::new(spec.squeeze())?;
                let (c1, c2) = spec.weights();
                let mixed = spec.family.is_mixture();
                let norm = if mixed {
                    branch_norm_sq(op, n, &frame)?.to_complex().re * (c1.norm_sqr() + c2.norm_sqr())
                } else {
                    superposition_norm_sq(op, n, &frame, c1, c2)?.to_complex().re
                };
                if !(norm.is_finite() && norm > 0.0) {
                    return Err(Error::NonFiniteTerm("state norm"));
                }
                Closed::Pair { op, n, frame, c1, c2, mixed, norm, kernel: OverlapKernel::new(op, n, frame)? }
            }
        };
        Ok(Self(inner))
    }

    /// Trace-normalised Wigner value at `α`.
    pub fn wigner(&self, alpha: Complex64) -> Result<f64> {
        let v = match self.0 {
            Closed::Coherent { x0 } => wigner_coherent(x0, 0.0, alpha),
            Closed::Compass { x0, norm } => wigner_compass(x0, alpha)? / norm,
            Closed::Single { op, n, frame, branch, norm } => {
                let point = PhasePointMap::new(alpha, &frame);
                (wigner_branch_log(op, n, &frame, branch, &point)? / norm).to_complex().re
            }
            Closed::Pair { op, n, frame, c1, c2, mixed, norm, .. } => {
                let point = PhasePointMap::new(alpha, &frame);
                let mut w = wigner_mixture(op, n, &frame, c1, c2, &point)?;
                if !mixed {
                    w += 2.0 * superposition_cross(op, n, &frame, c1, c2, &point)?.re;
                }
                w / norm
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteTerm("Wigner value"))
        }
    }

    /// Origin-normalised displacement overlap at `δα`.
    pub fn overlap(&self, delta_alpha: Complex64) -> Result<f64> {
        let v = match self.0 {
            Closed::Coherent { .. } => overlap_coherent(delta_alpha),
            Closed::Compass { x0, .. } => overlap_compass(x0, delta_alpha)?,
            Closed::Single { op, n, frame, branch, norm } => {
                let d = DisplacementFrame::new(delta_alpha, &frame);
                (overlap_term_log(op, n, &frame, branch, &d)? / norm).to_complex().norm_sqr()
            }
            Closed::Pair { frame, c1, c2, mixed, kernel, .. } => {
                let d = DisplacementFrame::new(delta_alpha, &frame);
                if mixed {
                    kernel.mixture(c1, c2, &d)?
                } else {
                    kernel.superposition(c1, c2, &d)?
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteTerm("overlap value"))
        }
    }
}

/// Builds the normalised oracle density matrix for a spec.
pub fn oracle_state(spec: &StateSpec, policy: &CutoffPolicy) -> Result<DensityMatrix> {
    spec.validate()?;
    let r = spec.squeeze();
    let n = spec.photons();
    let pure = |v: fock::FockVector| DensityMatrix::from_pure(&v.normalized()?);
    let branch_state = |op: Operation, b: Branch| match op {
        Operation::Added => fock::photon_added_squeezed(n, r, b, policy),
        Operation::Subtracted => fock::photon_subtracted_squeezed(n, r, b, policy),
    };
    match spec.family {
        Family::Coherent => pure(fock::coherent_state(alpha_from_xp(spec.separation(), 0.0), policy)?),
        Family::Compass => pure(fock::compass_state(spec.separation(), policy)?),
        Family::Svs => pure(fock::squeezed_vacuum(r, spec.branch_or_plus(), policy)?),
        Family::Pasvs | Family::Pssvs => {
            let op = spec.family.operation().expect("photon family");
            pure(branch_state(op, spec.branch_or_plus())?)
        }
        Family::Spasvs | Family::Spssvs => {
            let op = spec.family.operation().expect("photon family");
            let (c1, c2) = spec.weights();
            let v = fock::superpose(c1, &branch_state(op, Branch::Plus)?, c2, &branch_state(op, Branch::Minus)?)?;
            pure(v)
        }
        Family::MixPa | Family::MixPs => {
            let op = spec.family.operation().expect("photon family");
            let (c1, c2) = spec.weights();
            fock::mix(c1.norm_sqr(), &branch_state(op, Branch::Plus)?, c2.norm_sqr(), &branch_state(op, Branch::Minus)?)
        }
    }
}

/// Default oracle cutoff policy for a spec.
pub fn default_policy(spec: &StateSpec) -> CutoffPolicy {
    let mut policy = CutoffPolicy::for_photons(spec.photons());
    // coherent components carry about x0²/2 photons
    let coherent = spec.separation().powi(2) / 2.0;
    let needed = (coherent + 10.0 * coherent.sqrt() + 32.0).ceil() as usize;
    policy.initial = policy.initial.max(needed);
    policy
}

/// The oracle evaluator: a converged density matrix.
#[derive(Debug, Clone)]
pub struct OracleModel {
    rho: DensityMatrix,
    purity: f64,
}

impl OracleModel {
    pub fn new(spec: &StateSpec, policy: &CutoffPolicy) -> Result<Self> {
        let rho = oracle_state(spec, policy)?;
        let purity = rho.purity();
        Ok(Self { rho, purity })
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn wigner(&self, alpha: Complex64) -> Result<f64> {
        fock::wigner_point(&self.rho, alpha)
    }

    /// Divided by the purity so the origin value is one.
    pub fn overlap(&self, delta_alpha: Complex64) -> Result<f64> {
        Ok(fock::overlap_displaced(&self.rho, delta_alpha)? / self.purity)
    }
}

/// Point evaluator for either backend.
// built once per run, so the inline closed-form kernel is not worth boxing
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum Model {
    ClosedForm(ClosedFormModel),
    Oracle(OracleModel),
}

impl Model {
    pub fn new(spec: &StateSpec, backend: Backend) -> Result<Self> {
        Self::with_policy(spec, backend, &default_policy(spec))
    }

    pub fn with_policy(spec: &StateSpec, backend: Backend, policy: &CutoffPolicy) -> Result<Self> {
        Ok(match backend {
            Backend::ClosedForm => Model::ClosedForm(ClosedFormModel::new(spec)?),
            Backend::Oracle => Model::Oracle(OracleModel::new(spec, policy)?),
        })
    }

    pub fn backend(&self) -> Backend {
        match self {
            Model::ClosedForm(_) => Backend::ClosedForm,
            Model::Oracle(_) => Backend::Oracle,
        }
    }

    pub fn cutoff(&self) -> Option<usize> {
        match self {
            Model::ClosedForm(_) => None,
            Model::Oracle(o) => Some(o.rho.cutoff()),
        }
    }

    /// Physical Wigner value or origin-normalised overlap at phase-space coordinates `(x, p)`.
    pub fn evaluate(&self, quantity: Quantity, x: f64, p: f64) -> Result<f64> {
        let a = alpha_from_xp(x, p);
        match (self, quantity) {
            (Model::ClosedForm(m), Quantity::Wigner) => m.wigner(a),
            (Model::ClosedForm(m), Quantity::Overlap) => m.overlap(a),
            (Model::Oracle(m), Quantity::Wigner) => m.wigner(a),
            (Model::Oracle(m), Quantity::Overlap) => m.overlap(a),
        }
    }
}

/// Samples a Wigner function or overlap map on `grid`.
///
/// Wigner fields are trace-normalised unless `spec.normalization` asks for origin
/// normalisation. Overlap maps are always origin-normalised.
pub fn evaluate_field(spec: &StateSpec, grid: &GridSpec, backend: Backend, quantity: Quantity) -> Result<ScalarField> {
    let model = Model::new(spec, backend)?;
    evaluate_model(&model, spec, grid, quantity)
}

/// [`evaluate_field`] with an already built model.
pub fn evaluate_model(model: &Model, spec: &StateSpec, grid: &GridSpec, quantity: Quantity) -> Result<ScalarField> {
    grid.validate()?;
    if !grid.contains_origin() {
        return Err(Error::InvalidInput("grid must contain the origin".into()));
    }
    let values = match model {
        Model::ClosedForm(_) => (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (ix, ip) = (k / grid.np, k % grid.np);
                model
                    .evaluate(quantity, grid.x(ix), grid.p(ip))
                    .map_err(|e| Error::AtGridPoint { ix, ip, source: Box::new(e) })
            })
            .collect::<Result<Vec<f64>>>()?,
        Model::Oracle(o) => match quantity {
            Quantity::Wigner => fock::wigner_grid(&o.rho, &grid.xs(), &grid.ps()),
            Quantity::Overlap => {
                let raw = fock::overlap_grid(&o.rho, &grid.xs(), &grid.ps());
                raw.into_iter().map(|v| v / o.purity).collect()
            }
        },
    };
    let origin_value = model.evaluate(quantity, 0.0, 0.0)?;
    let field = ScalarField {
        grid: *grid,
        values,
        origin_value,
        normalized: quantity == Quantity::Overlap,
        provenance: Provenance { spec: *spec, backend: model.backend(), quantity, cutoff: model.cutoff() },
    };
    if quantity == Quantity::Wigner && spec.normalization == Normalization::Origin {
        normalize_origin(&field)
    } else {
        Ok(field)
    }
}
