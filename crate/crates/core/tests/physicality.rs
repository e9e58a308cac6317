use std::f64::consts::FRAC_1_SQRT_2;

use subplanck::metrics::{central_tile_extent, extent_sweep, first_zero_radius, sensitivity_map};
use subplanck::phasespace::{
    evaluate_field, integrate, marginal, normalize_origin, Backend, Direction, GridSpec, MarginalAxis, Model,
    Normalization, Quantity, StateSpec,
};
use subplanck::{Branch, Operation};

fn physical(spec: StateSpec) -> StateSpec {
    spec.with_normalization(Normalization::Physical)
}

#[test]
fn vacuum_marginal_integrates_to_one() {
    let grid = GridSpec::wigner_default();
    let w = evaluate_field(&physical(StateSpec::coherent(0.0)), &grid, Backend::Oracle, Quantity::Wigner).unwrap();
    let m = marginal(&w, MarginalAxis::X);
    let total: f64 = m.iter().sum::<f64>() * grid.step_x();
    assert!((total - 1.0).abs() < 1e-3);
    assert!((integrate(&w) - 1.0).abs() < 1e-3);
}

#[test]
fn photon_subtracted_marginals_nonnegative() {
    let spec = physical(StateSpec::single(Operation::Subtracted, 2, 0.5, Branch::Plus));
    for backend in [Backend::ClosedForm, Backend::Oracle] {
        let w = evaluate_field(&spec, &GridSpec::wigner_default(), backend, Quantity::Wigner).unwrap();
        for axis in [MarginalAxis::X, MarginalAxis::P] {
            assert!(marginal(&w, axis).iter().all(|v| *v >= -1e-9));
        }
    }
}

#[test]
fn squeezed_quadrature_variances() {
    let r = 0.5;
    let grid = GridSpec::square(8.0, 321).unwrap();
    let w = evaluate_field(&physical(StateSpec::svs(r, Branch::Plus)), &grid, Backend::Oracle, Quantity::Wigner).unwrap();
    let var = |axis, coord: Vec<f64>, step: f64| -> f64 {
        marginal(&w, axis).iter().zip(&coord).map(|(m, c)| m * c * c).sum::<f64>() * step
    };
    let vx = var(MarginalAxis::X, grid.xs(), grid.step_x());
    let vp = var(MarginalAxis::P, grid.ps(), grid.step_p());
    let ratio = vx / vp;
    let expect = (4.0 * r).exp();
    // the ratio is e^{+4r} or e^{−4r} depending on the squeezing direction
    let rel = ((ratio - expect) / expect).abs().min(((ratio - 1.0 / expect) * expect).abs());
    assert!(rel < 0.02, "ratio {ratio}");
}

#[test]
fn odd_photon_number_normalises_to_minus_one() {
    let spec = StateSpec::single(Operation::Added, 11, 0.5, Branch::Plus);
    let grid = GridSpec::square(2.0, 41).unwrap();
    for backend in [Backend::ClosedForm, Backend::Oracle] {
        let f = evaluate_field(&spec, &grid, backend, Quantity::Wigner).unwrap();
        assert!((f.at(20, 20) + 1.0).abs() < 1e-9, "{backend}");
        assert_eq!(normalize_origin(&f).unwrap(), f);
    }
    let vac = evaluate_field(&StateSpec::coherent(0.0), &grid, Backend::ClosedForm, Quantity::Wigner).unwrap();
    assert_eq!(vac.at(20, 20), 1.0);
}

#[test]
fn overlap_maps_bounded() {
    let grid = GridSpec::overlap_default();
    for spec in [
        StateSpec::superposition(Operation::Added, 10, 0.5, FRAC_1_SQRT_2),
        StateSpec::mixture(Operation::Subtracted, 10, 0.5, FRAC_1_SQRT_2),
        StateSpec::compass(6.0),
    ] {
        for backend in [Backend::ClosedForm, Backend::Oracle] {
            let f = evaluate_field(&spec, &grid, backend, Quantity::Overlap).unwrap();
            assert!(f.values.iter().all(|v| (0.0..=1.0 + 1e-10).contains(v)), "{} {backend}", spec.family);
        }
    }
}

#[test]
fn extents_are_backend_independent() {
    for spec in [
        StateSpec::superposition(Operation::Added, 10, 0.5, FRAC_1_SQRT_2),
        StateSpec::single(Operation::Subtracted, 7, 0.3, Branch::Minus),
        StateSpec::mixture(Operation::Added, 4, 0.8, 0.6),
    ] {
        for axis in [Direction::X, Direction::P] {
            let a = central_tile_extent(&spec, axis, Backend::ClosedForm).unwrap();
            let b = central_tile_extent(&spec, axis, Backend::Oracle).unwrap();
            assert!((a.hwhm - b.hwhm).abs() <= 1e-6, "{} {axis}", spec.family);
            assert!(a.residual <= 1e-9);
        }
    }
}

#[test]
fn unbalanced_superposition_is_anisotropic() {
    let base = StateSpec::superposition(Operation::Added, 5, 0.5, 0.1);
    let t = extent_sweep(&base, &[5.0, 50.0], Backend::ClosedForm).unwrap();
    let shrink_x = t.rows[1].hwhm_x / t.rows[0].hwhm_x;
    let shrink_p = t.rows[1].hwhm_p / t.rows[0].hwhm_p;
    let (strong, weak) = if shrink_x < shrink_p { (shrink_x, shrink_p) } else { (shrink_p, shrink_x) };
    assert!(strong < 0.5 * weak, "x {shrink_x}, p {shrink_p}");
}

#[test]
fn radii_do_not_grow_with_photon_number() {
    for op in [Operation::Added, Operation::Subtracted] {
        for d in [Direction::X, Direction::P, Direction::Diagonal] {
            let radii: Vec<f64> = [10, 15, 20]
                .iter()
                .map(|&n| {
                    let m = Model::new(&StateSpec::superposition(op, n, 0.5, FRAC_1_SQRT_2), Backend::ClosedForm).unwrap();
                    first_zero_radius(&m, d).unwrap().unwrap_or(f64::INFINITY)
                })
                .collect();
            assert!(radii.windows(2).all(|w| w[1] <= w[0]), "{op:?} {d}: {radii:?}");
        }
    }
}

#[test]
fn mixture_map_zeros_on_diagonals() {
    let spec = StateSpec::mixture(Operation::Added, 15, 0.5, FRAC_1_SQRT_2);
    let map = sensitivity_map(&spec, &GridSpec::square(1.5, 31).unwrap(), Backend::ClosedForm).unwrap();
    assert!(map.radius(Direction::X).unwrap().radius.is_none());
    assert!(map.radius(Direction::P).unwrap().radius.is_none());
    assert!(map.radius(Direction::Diagonal).unwrap().radius.is_some());
}
