use std::f64::consts::FRAC_1_SQRT_2;

use proptest::prelude::*;
use subplanck::closedform::{hermite, superposition_cross, PhasePointMap, SqueezeFrame};
use subplanck::phasespace::{
    evaluate_field, normalize_origin, residual_stats, Backend, GridSpec, Model, Quantity, StateSpec,
};
use subplanck::{alpha_from_xp, Branch, Complex64, Operation};

fn op_strategy() -> impl Strategy<Value = Operation> {
    prop_oneof![Just(Operation::Added), Just(Operation::Subtracted)]
}

fn branch_strategy() -> impl Strategy<Value = Branch> {
    prop_oneof![Just(Branch::Plus), Just(Branch::Minus)]
}

/// Any squeezed-family spec with moderate parameters.
fn spec_strategy() -> impl Strategy<Value = StateSpec> {
    (op_strategy(), branch_strategy(), 0usize..=12, 0.1f64..1.0, 0.05f64..0.999, 0usize..3).prop_map(
        |(op, b, n, r, c1, kind)| match kind {
            0 => StateSpec::single(op, n.max(1), r, b),
            1 => StateSpec::superposition(op, n, r, c1),
            _ => StateSpec::mixture(op, n, r, c1),
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_is_inversion_symmetric(spec in spec_strategy(), dx in -1.5f64..1.5, dp in -1.5f64..1.5) {
        let m = Model::new(&spec, Backend::ClosedForm).unwrap();
        let a = m.evaluate(Quantity::Overlap, dx, dp).unwrap();
        let b = m.evaluate(Quantity::Overlap, -dx, -dp).unwrap();
        prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        prop_assert!((-1e-12..=1.0 + 1e-10).contains(&a));
    }

    #[test]
    fn wigner_is_inversion_symmetric(spec in spec_strategy(), x in -4.0f64..4.0, p in -4.0f64..4.0) {
        let m = Model::new(&spec, Backend::ClosedForm).unwrap();
        let scale = std::f64::consts::FRAC_2_PI;
        let a = m.evaluate(Quantity::Wigner, x, p).unwrap();
        let b = m.evaluate(Quantity::Wigner, -x, -p).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * scale, "{a} vs {b}");
    }

    #[test]
    fn hermite_derivative_identity(re in -3.0f64..3.0, im in -3.0f64..3.0, n in 1usize..=12) {
        let z = Complex64::new(re, im);
        let h = 1e-3;
        let f = |w: Complex64| hermite(n, w).to_complex();
        let stencil = (f(z - 2.0 * h) - f(z + 2.0 * h) + 8.0 * (f(z + h) - f(z - h))) / (12.0 * h);
        let exact = hermite(n - 1, z).to_complex() * (2.0 * n as f64);
        prop_assert!((stencil - exact).norm() <= 1e-9 * exact.norm().max(1.0));
    }

    #[test]
    fn origin_sign_follows_photon_parity(op in op_strategy(), b in branch_strategy(), n in 1usize..=20) {
        let m = Model::new(&StateSpec::single(op, n, 0.5, b), Backend::ClosedForm).unwrap();
        let w0 = m.evaluate(Quantity::Wigner, 0.0, 0.0).unwrap();
        prop_assert_eq!(w0.signum(), if n % 2 == 0 { 1.0 } else { -1.0 });
    }

    #[test]
    fn cross_term_real_part_is_symmetric_sum(op in op_strategy(), n in 0usize..=10, r in 0.1f64..1.0,
                                             x in -3.0f64..3.0, p in -3.0f64..3.0) {
        let frame = SqueezeFrame::new(r).unwrap();
        let point = PhasePointMap::new(alpha_from_xp(x, p), &frame);
        let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let i = superposition_cross(op, n, &frame, c, c, &point).unwrap();
        let sum = i + i.conj();
        prop_assert!(sum.im.abs() <= 1e-12 * i.norm().max(1e-300));
        prop_assert!((sum.re - 2.0 * i.re).abs() <= 1e-12 * i.norm().max(1e-300));
    }

    #[test]
    fn spec_survives_json(spec in spec_strategy()) {
        let back: StateSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn fields_are_deterministic() {
    let spec = StateSpec::superposition(Operation::Subtracted, 7, 0.6, 0.8);
    let grid = GridSpec::square(2.0, 31).unwrap();
    for backend in [Backend::ClosedForm, Backend::Oracle] {
        let a = evaluate_field(&spec, &grid, backend, Quantity::Wigner).unwrap();
        let b = evaluate_field(&spec, &grid, backend, Quantity::Wigner).unwrap();
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
        let s = residual_stats(&a, &b).unwrap();
        assert_eq!((s.max_abs, s.max_rel_to_peak, s.rms), (0.0, 0.0, 0.0));
        assert_eq!(normalize_origin(&a).unwrap(), a);
    }
}
