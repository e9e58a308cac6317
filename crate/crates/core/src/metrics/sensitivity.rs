use serde::{Deserialize, Serialize};

use super::first_crossing;
use super::SCAN_STEP;
use crate::phasespace::{evaluate_model, Backend, Direction, GridSpec, Model, Quantity, ScalarField, StateSpec};
use crate::Result;

/// Origin-normalised overlap treated as vanished below this value.
pub const ZERO_THRESHOLD: f64 = 1e-3;
/// Radius searched for a first zero.
pub const RADIUS_BOUND: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRadius {
    pub direction: Direction,
    /// `None` when the overlap stays above the threshold out to [`RADIUS_BOUND`].
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ZeroRadius {
    /// Missing radii compare as infinitely far away.
    pub fn or_infinity(&self) -> f64 {
        self.radius.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMap {
    pub field: ScalarField,
    pub radii: Vec<ZeroRadius>,
}

impl OverlapMap {
    pub fn radius(&self, direction: Direction) -> Option<&ZeroRadius> {
        self.radii.iter().find(|z| z.direction == direction)
    }
}

/// First distance along `direction` where the overlap falls below [`ZERO_THRESHOLD`].
pub fn first_zero_radius(model: &Model, direction: Direction) -> Result<Option<f64>> {
    let (ux, up) = direction.unit();
    let f = |t: f64| -> Result<f64> { Ok(model.evaluate(Quantity::Overlap, t * ux, t * up)? - ZERO_THRESHOLD) };
    Ok(first_crossing(f, SCAN_STEP, RADIUS_BOUND)?.map(|(t, _, _)| t))
}

/// Overlap map on `grid` (in `(δx, δp)`) plus first-zero radii along the axes and both diagonals.
pub fn sensitivity_map(spec: &StateSpec, grid: &GridSpec, backend: Backend) -> Result<OverlapMap> {
    let model = Model::new(spec, backend)?;
    let field = evaluate_model(&model, spec, grid, Quantity::Overlap)?;
    let radii = Direction::ALL
        .into_iter()
        .map(|direction| {
            let radius = first_zero_radius(&model, direction)?;
            let note = radius.is_none().then(|| format!("no value below {ZERO_THRESHOLD} within {RADIUS_BOUND}"));
            Ok(ZeroRadius { direction, radius, note })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OverlapMap { field, radii })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Operation;

    #[test]
    fn coherent_has_no_zero() {
        let grid = GridSpec::square(1.5, 31).unwrap();
        let map = sensitivity_map(&StateSpec::coherent(0.0), &grid, Backend::ClosedForm).unwrap();
        assert!(map.radii.iter().all(|z| z.radius.is_none() && z.note.is_some()));
        // radius 1 along δx is |δα|² = 1/2, so the map value there is e^{−1/2}
        let model = Model::new(&StateSpec::coherent(0.0), Backend::ClosedForm).unwrap();
        let v = model.evaluate(Quantity::Overlap, std::f64::consts::SQRT_2, 0.0).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn compass_diagonal_zero() {
        let model = Model::new(&StateSpec::compass(12.0), Backend::ClosedForm).unwrap();
        let r = first_zero_radius(&model, Direction::Diagonal).unwrap().unwrap();
        let expect = std::f64::consts::SQRT_2 * std::f64::consts::PI / 24.0;
        assert!((r - expect).abs() < 0.01, "{r} vs {expect}");
    }

    #[test]
    fn mixture_zeros_on_diagonals_only() {
        let spec = StateSpec::mixture(Operation::Added, 15, 0.5, std::f64::consts::FRAC_1_SQRT_2);
        let model = Model::new(&spec, Backend::ClosedForm).unwrap();
        assert!(first_zero_radius(&model, Direction::X).unwrap().is_none());
        assert!(first_zero_radius(&model, Direction::P).unwrap().is_none());
        assert!(first_zero_radius(&model, Direction::Diagonal).unwrap().is_some());
        assert!(first_zero_radius(&model, Direction::AntiDiagonal).unwrap().is_some());
    }
}
