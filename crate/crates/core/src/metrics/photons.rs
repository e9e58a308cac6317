use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{branch_norm_sq, compass_norm_sq, superposition_norm_sq, SqueezeFrame};
use crate::fock::MeanPhoton;
use crate::phasespace::{default_policy, Backend, Family, Model, OracleModel, StateSpec};
use crate::{Branch, Error, Operation, Result};

/// `⟨a†a⟩` from the number-basis norm series.
///
/// Uses `‖a ψ‖²` for subtraction and `‖a† ψ‖² − ‖ψ‖²` for addition, both of
/// which are norms of the same family at `n + 1`.
pub fn mean_photon(spec: &StateSpec) -> Result<f64> {
    spec.validate()?;
    let x0 = spec.separation();
    match spec.family {
        Family::Coherent => return Ok(0.5 * x0 * x0),
        Family::Compass => return Ok(compass_mean_photon(x0)),
        _ => {}
    }
    let op = spec.family.operation().unwrap_or(Operation::Added);
    let n = spec.photons();
    let frame = SqueezeFrame::new(spec.squeeze())?;
    let ratio = if matches!(spec.family, Family::Spasvs | Family::Spssvs) {
        let (c1, c2) = spec.weights();
        superposition_norm_sq(op, n + 1, &frame, c1, c2)? / superposition_norm_sq(op, n, &frame, c1, c2)?
    } else {
        branch_norm_sq(op, n + 1, &frame)? / branch_norm_sq(op, n, &frame)?
    };
    let ratio = ratio.to_complex().re;
    let v = match op {
        Operation::Added => ratio - 1.0,
        Operation::Subtracted => ratio,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteTerm("mean photon ratio"))
    }
}

fn compass_mean_photon(x0: f64) -> f64 {
    let a = x0 * FRAC_1_SQRT_2;
    let pts = [Complex64::new(a, 0.0), Complex64::new(-a, 0.0), Complex64::new(0.0, a), Complex64::new(0.0, -a)];
    let mut acc = Complex64::new(0.0, 0.0);
    for u in pts {
        for v in pts {
            // ⟨u|a†a|v⟩ = u* v ⟨u|v⟩
            acc += u.conj() * v * (u.conj() * v - 0.5 * u.norm_sqr() - 0.5 * v.norm_sqr()).exp();
        }
    }
    acc.re / compass_norm_sq(x0)
}

pub(crate) fn model_mean_photon(model: &Model, spec: &StateSpec) -> Result<f64> {
    match model {
        Model::ClosedForm(_) => mean_photon(spec),
        Model::Oracle(o) => Ok(o.density().mean_photon()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonStatsRow {
    pub n: usize,
    pub pasvs: f64,
    pub pssvs: f64,
    pub spasvs: f64,
    pub spssvs: f64,
}

/// Oracle mean photon numbers; single branches use `S(+r)` and superpositions `c1 = c2 = 1/√2`.
pub fn photon_stats_sweep(n_list: &[usize], r: f64) -> Result<Vec<PhotonStatsRow>> {
    photon_stats_sweep_with(n_list, r, Backend::Oracle)
}

/// [`photon_stats_sweep`] from either backend.
pub fn photon_stats_sweep_with(n_list: &[usize], r: f64, backend: Backend) -> Result<Vec<PhotonStatsRow>> {
    n_list
        .par_iter()
        .map(|&n| {
            let eval = |spec: StateSpec| -> Result<f64> {
                match backend {
                    Backend::ClosedForm => mean_photon(&spec),
                    Backend::Oracle => Ok(OracleModel::new(&spec, &default_policy(&spec))?.density().mean_photon()),
                }
            };
            let single = |op| {
                if n == 0 {
                    eval(StateSpec::svs(r, Branch::Plus))
                } else {
                    eval(StateSpec::single(op, n, r, Branch::Plus))
                }
            };
            Ok(PhotonStatsRow {
                n,
                pasvs: single(Operation::Added)?,
                pssvs: single(Operation::Subtracted)?,
                spasvs: eval(StateSpec::superposition(Operation::Added, n, r, FRAC_1_SQRT_2))?,
                spssvs: eval(StateSpec::superposition(Operation::Subtracted, n, r, FRAC_1_SQRT_2))?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_row_is_squeezed_vacuum() {
        let rows = photon_stats_sweep(&[0], 0.5).unwrap();
        let s = 0.5f64.sinh().powi(2);
        assert!((rows[0].pasvs - s).abs() < 1e-10 && (rows[0].pssvs - s).abs() < 1e-10);
    }

    #[test]
    fn sweep_backends_agree() {
        let a = photon_stats_sweep_with(&[0, 3, 8], 0.5, Backend::ClosedForm).unwrap();
        let b = photon_stats_sweep(&[0, 3, 8], 0.5).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (u, v) in [(x.pasvs, y.pasvs), (x.pssvs, y.pssvs), (x.spasvs, y.spasvs), (x.spssvs, y.spssvs)] {
                assert!((u - v).abs() < 1e-9 * v.max(1.0), "{u} vs {v}");
            }
        }
    }

    #[test]
    fn series_matches_oracle() {
        let specs = [
            StateSpec::single(Operation::Added, 4, 0.5, Branch::Minus),
            StateSpec::single(Operation::Subtracted, 3, 0.8, Branch::Plus),
            StateSpec::superposition(Operation::Added, 3, 0.5, 0.6),
            StateSpec::superposition(Operation::Subtracted, 2, 0.5, 0.6),
            StateSpec::mixture(Operation::Subtracted, 2, 0.3, 0.6),
            StateSpec::compass(4.0),
            StateSpec::coherent(2.0),
        ];
        for spec in specs {
            let a = mean_photon(&spec).unwrap();
            let b = OracleModel::new(&spec, &default_policy(&spec)).unwrap().density().mean_photon();
            assert!((a - b).abs() < 1e-9 * b.max(1.0), "{}: {a} vs {b}", spec.family);
        }
    }

    #[test]
    fn addition_outnumbers_subtraction() {
        let row = photon_stats_sweep(&[10], 0.5).unwrap()[0];
        assert!(row.pasvs > row.pssvs && row.spasvs > row.spssvs);
    }
}
