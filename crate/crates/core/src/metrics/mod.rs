//! Figure-level observables: central-tile extents, their scaling with photon
//! number or separation, first-zero radii of overlap maps and mean photon
//! numbers.

mod extent;
mod fit;
mod photons;
mod sensitivity;

pub use extent::{central_tile_extent, central_tile_extent_with, ExtentRecord, SCAN_BOUND, SCAN_STEP};
pub use extent::{extent_sweep, SweepRow, SweepTable, SweepVariable, SkippedRow};
pub use fit::{log_log_fit, LogLogFit};
pub use photons::{mean_photon, photon_stats_sweep, photon_stats_sweep_with, PhotonStatsRow};
pub use sensitivity::{first_zero_radius, sensitivity_map, OverlapMap, ZeroRadius, RADIUS_BOUND, ZERO_THRESHOLD};

/// Bisection stops once the residual or the bracket falls below this.
pub const BISECTION_TOLERANCE: f64 = 1e-12;
const MAX_BISECTIONS: usize = 200;

/// Root, scan bracket and bisection count.
pub(crate) type Crossing = (f64, (f64, f64), usize);

/// Smallest `t` in `(0, bound]` with `f(t) ≤ 0`, assuming `f(0) > 0`.
///
/// Scans with `step`, then bisects the first bracket. Returns the root, the
/// scan bracket and the number of bisection steps, or `None` without a
/// crossing.
pub(crate) fn first_crossing<F>(f: F, step: f64, bound: f64) -> crate::Result<Option<Crossing>>
where
    F: Fn(f64) -> crate::Result<f64>,
{
    let steps = (bound / step).round() as usize;
    let mut prev = 0.0;
    for k in 1..=steps {
        let t = (k as f64 * step).min(bound);
        if f(t)? <= 0.0 {
            let (mut lo, mut hi) = (prev, t);
            let mut iterations = 0;
            let mut mid = 0.5 * (lo + hi);
            while iterations < MAX_BISECTIONS {
                iterations += 1;
                mid = 0.5 * (lo + hi);
                let v = f(mid)?;
                if v.abs() <= BISECTION_TOLERANCE || hi - lo <= BISECTION_TOLERANCE {
                    break;
                }
                if v > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Some((mid, (prev, t), iterations)));
        }
        prev = t;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_of_a_line() {
        let (t, (lo, hi), _) = first_crossing(|t| Ok(0.3217 - t), 1e-3, 1.0).unwrap().unwrap();
        assert!((t - 0.3217).abs() < 1e-11 && lo < t && t < hi);
        assert!(first_crossing(|t| Ok(2.0 - t), 1e-3, 1.0).unwrap().is_none());
    }

    #[test]
    fn smallest_bracket_wins() {
        // cos crosses zero at π/2 and 3π/2
        let (t, _, _) = first_crossing(|t| Ok(t.cos()), 1e-3, 6.0).unwrap().unwrap();
        assert!((t - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }
}
