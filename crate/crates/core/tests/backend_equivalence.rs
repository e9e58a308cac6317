use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use subplanck::closedform::{overlap_compass_approx, overlap_term_pasvs, overlap_term_pssvs, DisplacementFrame, SqueezeFrame};
use subplanck::fock::{self, CutoffPolicy, OperatorMatrix};
use subplanck::phasespace::{
    evaluate_field, oracle_state, residual_stats, Backend, GridSpec, Model, Normalization, Quantity, StateSpec,
};
use subplanck::{alpha_from_xp, Branch, Complex64, Operation};

fn both(spec: &StateSpec, grid: &GridSpec, q: Quantity) -> (subplanck::phasespace::ScalarField, subplanck::phasespace::ScalarField) {
    (
        evaluate_field(spec, grid, Backend::ClosedForm, q).unwrap(),
        evaluate_field(spec, grid, Backend::Oracle, q).unwrap(),
    )
}

#[test]
fn compass_fields_agree() {
    let (a, b) = both(&StateSpec::compass(8.0), &GridSpec::wigner_default(), Quantity::Wigner);
    assert!(residual_stats(&a, &b).unwrap().max_rel_to_peak <= 1e-6);
}

#[test]
fn spasvs_fields_agree() {
    let spec = StateSpec::superposition(Operation::Added, 10, 0.5, FRAC_1_SQRT_2).with_normalization(Normalization::Physical);
    let (a, b) = both(&spec, &GridSpec::wigner_default(), Quantity::Wigner);
    assert!(residual_stats(&a, &b).unwrap().max_rel_to_peak <= 1e-8);
}

/// For n = 10 the branch interference sits along the diagonals at radius 2 to 3.
#[test]
fn interference_term_is_visible() {
    let grid = GridSpec::square(3.0, 121).unwrap();
    for op in [Operation::Added, Operation::Subtracted] {
        let s = StateSpec::superposition(op, 10, 0.5, FRAC_1_SQRT_2);
        let m = StateSpec::mixture(op, 10, 0.5, FRAC_1_SQRT_2);
        let a = evaluate_field(&s, &grid, Backend::ClosedForm, Quantity::Wigner).unwrap();
        let b = evaluate_field(&m, &grid, Backend::ClosedForm, Quantity::Wigner).unwrap();
        let d = residual_stats(&a, &b).unwrap().max_abs;
        assert!(d > 0.1, "{op:?}: {d}");
    }
}

#[test]
fn overlap_terms_match_matrix_elements() {
    let r = 0.5;
    let frame = SqueezeFrame::new(r).unwrap();
    let delta = Complex64::new(0.1, 0.05);
    let d = DisplacementFrame::new(delta, &frame);
    let policy = CutoffPolicy::for_photons(10);
    for b in [Branch::Plus, Branch::Minus] {
        let pa = fock::photon_added_squeezed(10, r, b, &policy).unwrap();
        let ps = fock::photon_subtracted_squeezed(10, r, b, &policy).unwrap();
        let cases = [
            (overlap_term_pasvs(10, &frame, b, &d).unwrap(), fock::displaced_amplitude(&pa, delta)),
            (overlap_term_pssvs(10, &frame, b, &d).unwrap(), fock::displaced_amplitude(&ps, delta)),
        ];
        for (closed, oracle) in cases {
            assert!((closed - oracle).norm() <= 1e-8 * oracle.norm(), "{closed} vs {oracle}");
        }
    }
}

#[test]
fn superposition_overlap_within_cross_term_error() {
    let grid = GridSpec::square(0.5, 21).unwrap();
    for op in [Operation::Added, Operation::Subtracted] {
        let (a, b) = both(&StateSpec::superposition(op, 10, 0.5, FRAC_1_SQRT_2), &grid, Quantity::Overlap);
        assert!(residual_stats(&a, &b).unwrap().max_abs <= 0.02);
    }
}

#[test]
fn compass_approximation_tracks_oracle() {
    let grid = GridSpec::square(0.5, 21).unwrap();
    let o = evaluate_field(&StateSpec::compass(12.0), &grid, Backend::Oracle, Quantity::Overlap).unwrap();
    let worst = o.points().map(|(x, p, v)| (v - overlap_compass_approx(12.0, x, p)).abs()).fold(0.0, f64::max);
    assert!(worst <= 0.02, "{worst}");
}

/// The closed-form mixture overlap keeps only the diagonal branch terms; adding
/// back `2 w₁ w₂ |⟨ψ₊|D|ψ₋⟩|²` and renormalising by the purity recovers the
/// exact value.
#[test]
fn mixture_overlap_misses_only_branch_cross_term() {
    let (w1, w2): (f64, f64) = (0.36, 0.64);
    let c1 = w1.sqrt();
    for op in [Operation::Added, Operation::Subtracted] {
        let spec = StateSpec::mixture(op, 5, 0.5, c1);
        let rho = oracle_state(&spec, &CutoffPolicy::for_photons(5)).unwrap();
        let (plus, minus) = (&rho.ensemble()[0].1, &rho.ensemble()[1].1);
        let closed = Model::new(&spec, Backend::ClosedForm).unwrap();
        let oracle = Model::new(&spec, Backend::Oracle).unwrap();
        let purity = rho.purity();
        for (x, p) in [(0.3, 0.0), (0.2, -0.45), (0.7, 0.7)] {
            let delta = alpha_from_xp(x, p);
            let d = OperatorMatrix::displacement_exact(delta, rho.cutoff());
            let cross = plus.inner(&d.apply(minus)).norm_sqr();
            let rebuilt = closed.evaluate(Quantity::Overlap, x, p).unwrap() * (w1 * w1 + w2 * w2) + 2.0 * w1 * w2 * cross;
            let exact = oracle.evaluate(Quantity::Overlap, x, p).unwrap() * purity;
            assert!((rebuilt - exact).abs() < 1e-12, "({x}, {p}): {rebuilt} vs {exact}");
        }
    }
}

#[test]
fn mixture_overlap_regression_bounds() {
    // measured deviations on [−1.5, 1.5]², frozen with headroom
    let grid = GridSpec::overlap_default();
    for (op, n, bound) in [(Operation::Added, 15, 1e-8), (Operation::Subtracted, 15, 5e-6), (Operation::Added, 20, 1e-10)] {
        let (a, b) = both(&StateSpec::mixture(op, n, 0.5, FRAC_1_SQRT_2), &grid, Quantity::Overlap);
        let dev = residual_stats(&a, &b).unwrap().max_abs;
        assert!(dev <= bound, "{op:?} n={n}: {dev:.3e}");
    }
}

#[test]
fn spasvs_overlap_map_budget() {
    let spec = StateSpec::superposition(Operation::Added, 10, 0.5, FRAC_1_SQRT_2);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let map = pool.install(|| evaluate_field(&spec, &GridSpec::overlap_default(), Backend::ClosedForm, Quantity::Overlap)).unwrap();
    assert_eq!(map.values.len(), 121 * 121);
    assert!(start.elapsed().as_secs_f64() < 60.0);
}
