use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{log_log_fit, LogLogFit};
use super::first_crossing;
use super::photons::model_mean_photon;
use crate::phasespace::{Backend, Direction, Model, Quantity, StateSpec, DEGENERATE_ORIGIN};
use crate::{Error, Result};

/// Scan resolution before bisection.
pub const SCAN_STEP: f64 = 1e-3;
/// Largest distance from the origin searched for the half-magnitude crossing.
pub const SCAN_BOUND: f64 = 6.0;

/// Half width at half magnitude of the central tile along one direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtentRecord {
    pub spec: StateSpec,
    pub axis: Direction,
    pub backend: Backend,
    pub hwhm: f64,
    /// Scan bracket `(lo, hi)` that contains `hwhm`.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `| |W_norm(hwhm·ê)| − 1/2 |`.
    pub residual: f64,
}

pub fn central_tile_extent(spec: &StateSpec, axis: Direction, backend: Backend) -> Result<ExtentRecord> {
    let model = Model::new(spec, backend)?;
    central_tile_extent_with(&model, spec, axis)
}

/// Smallest `t > 0` with `|W(t·ê)| / |W(0)| = 1/2`, from point evaluations.
pub fn central_tile_extent_with(model: &Model, spec: &StateSpec, axis: Direction) -> Result<ExtentRecord> {
    let origin = model.evaluate(Quantity::Wigner, 0.0, 0.0)?.abs();
    if !(origin >= DEGENERATE_ORIGIN) {
        return Err(Error::DegenerateNormalization(origin));
    }
    let (ux, up) = axis.unit();
    let f = |t: f64| -> Result<f64> { Ok(model.evaluate(Quantity::Wigner, t * ux, t * up)?.abs() / origin - 0.5) };
    let (hwhm, bracket, iterations) =
        first_crossing(f, SCAN_STEP, SCAN_BOUND)?.ok_or(Error::NoCrossing { bound: SCAN_BOUND })?;
    Ok(ExtentRecord { spec: *spec, axis, backend: model.backend(), hwhm, bracket, iterations, residual: f(hwhm)?.abs() })
}

/// Which spec field a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// Photon number `n`.
    Photons,
    /// Coherent amplitude `x0`.
    Separation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub hwhm_x: f64,
    pub hwhm_p: f64,
    pub mean_photon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRow {
    pub value: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub base: StateSpec,
    pub variable: SweepVariable,
    pub backend: Backend,
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedRow>,
    pub fit_x: Option<LogLogFit>,
    pub fit_p: Option<LogLogFit>,
}

impl SweepTable {
    /// True when both extents fall strictly from row to row.
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].hwhm_x < w[0].hwhm_x && w[1].hwhm_p < w[0].hwhm_p)
    }
}

fn with_value(base: &StateSpec, variable: SweepVariable, value: f64) -> Result<StateSpec> {
    let mut spec = *base;
    match variable {
        SweepVariable::Photons => {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(Error::InvalidInput(format!("photon number {value} is not a nonnegative integer")));
            }
            spec.n = Some(value as usize);
        }
        SweepVariable::Separation => spec.x0 = Some(value),
    }
    spec.validate()?;
    Ok(spec)
}

/// Central-tile extents along `x` and `p` for each value, with log-log fits.
///
/// The photon number is varied for squeezed families and `x0` for coherent
/// and compass states. Rows without a half-magnitude crossing are skipped and
/// listed in [`SweepTable::skipped`].
pub fn extent_sweep(base: &StateSpec, values: &[f64], backend: Backend) -> Result<SweepTable> {
    if values.is_empty() {
        return Err(Error::InvalidInput("sweep needs at least one value".into()));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("sweep values must be strictly ascending".into()));
    }
    let variable = if base.family.uses_x0() { SweepVariable::Separation } else { SweepVariable::Photons };
    let outcomes: Vec<Result<std::result::Result<SweepRow, SkippedRow>>> = values
        .par_iter()
        .map(|&value| {
            let spec = with_value(base, variable, value)?;
            let model = Model::new(&spec, backend)?;
            let mut extents = [0.0; 2];
            for (slot, axis) in extents.iter_mut().zip([Direction::X, Direction::P]) {
                match central_tile_extent_with(&model, &spec, axis) {
                    Ok(rec) => *slot = rec.hwhm,
                    Err(e @ Error::NoCrossing { .. }) => {
                        return Ok(Err(SkippedRow { value, reason: format!("{axis}: {e}") }));
                    }
                    Err(e) => return Err(e),
                }
            }
            let mean_photon = model_mean_photon(&model, &spec)?;
            Ok(Ok(SweepRow { value, hwhm_x: extents[0], hwhm_p: extents[1], mean_photon }))
        })
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for outcome in outcomes {
        match outcome? {
            Ok(row) => rows.push(row),
            Err(skip) => {
                log::warn!("sweep row {} skipped: {}", skip.value, skip.reason);
                skipped.push(skip);
            }
        }
    }
    let fit = |pick: fn(&SweepRow) -> f64| log_log_fit(&rows.iter().map(|r| (r.value, pick(r))).collect::<Vec<_>>());
    let fit_x = fit(|r| r.hwhm_x);
    let fit_p = fit(|r| r.hwhm_p);
    Ok(SweepTable { base: *base, variable, backend, rows, skipped, fit_x, fit_p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Operation;

    #[test]
    fn vacuum_extent() {
        let expect = (2f64.ln()).sqrt();
        for axis in Direction::ALL {
            let rec = central_tile_extent(&StateSpec::coherent(0.0), axis, Backend::ClosedForm).unwrap();
            assert!((rec.hwhm - expect).abs() < 1e-9, "{axis}");
            assert!(rec.residual <= 1e-9 && rec.bracket.0 < rec.hwhm && rec.hwhm < rec.bracket.1);
        }
    }

    #[test]
    fn compass_tiles_shrink_with_separation() {
        let a = central_tile_extent(&StateSpec::compass(8.0), Direction::X, Backend::ClosedForm).unwrap();
        let b = central_tile_extent(&StateSpec::compass(12.0), Direction::X, Backend::ClosedForm).unwrap();
        assert!(b.hwhm < a.hwhm);
    }

    #[test]
    fn addition_gives_smaller_tile_than_subtraction() {
        let c1 = std::f64::consts::FRAC_1_SQRT_2;
        let pa = StateSpec::superposition(Operation::Added, 10, 0.5, c1);
        let ps = StateSpec::superposition(Operation::Subtracted, 10, 0.5, c1);
        let a = central_tile_extent(&pa, Direction::X, Backend::ClosedForm).unwrap();
        let s = central_tile_extent(&ps, Direction::X, Backend::ClosedForm).unwrap();
        assert!(a.hwhm < s.hwhm);
    }

    #[test]
    fn backends_agree_on_extent() {
        let spec = StateSpec::superposition(Operation::Subtracted, 5, 0.5, 0.6);
        let a = central_tile_extent(&spec, Direction::P, Backend::ClosedForm).unwrap();
        let b = central_tile_extent(&spec, Direction::P, Backend::Oracle).unwrap();
        assert!((a.hwhm - b.hwhm).abs() < 1e-6);
    }

    #[test]
    fn sweep_validates_values() {
        let base = StateSpec::compass(4.0);
        assert!(extent_sweep(&base, &[], Backend::ClosedForm).is_err());
        assert!(extent_sweep(&base, &[6.0, 4.0], Backend::ClosedForm).is_err());
        let pa = StateSpec::superposition(Operation::Added, 5, 0.5, 0.6);
        assert!(extent_sweep(&pa, &[2.5], Backend::ClosedForm).is_err());
    }

    #[test]
    fn compass_sweep_slope() {
        let t = extent_sweep(&StateSpec::compass(4.0), &[4.0, 8.0, 16.0], Backend::ClosedForm).unwrap();
        assert_eq!(t.variable, SweepVariable::Separation);
        assert!((t.fit_x.unwrap().slope + 1.0).abs() < 0.1);
        assert!(t.strictly_decreasing());
        assert!((t.rows[0].mean_photon - 8.0).abs() < 0.4);
    }
}
