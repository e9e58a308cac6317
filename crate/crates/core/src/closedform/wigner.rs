//! Wigner functions of `op^n S(±r)|0⟩` and their superpositions.
//!
//! All values refer to the unnormalised states `ψ± = a†ⁿ S(±r)|0⟩` (or `aⁿ`)
//! on the `tr[ρΔ]/π` scale; divide by the squared norms in [`super::norms`]
//! for physical values.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use super::frames::{PhasePointMap, SqueezeFrame};
use super::hermite::{hermite_pair_sum, LogComplex};
use crate::{Branch, Operation, Result};

/// `(2/π) e^{χ±}`, the squeezed-vacuum Wigner function.
pub fn wigner_svs(branch: Branch, point: &PhasePointMap) -> f64 {
    FRAC_2_PI * point.chi(branch).exp()
}

/// `(2/π) c1 c2* e^ξ / √cosh 2r`, the interference term of `c1 S(r)|0⟩ + c2 S(−r)|0⟩`.
pub fn ssv_cross(frame: &SqueezeFrame, c1: Complex64, c2: Complex64, point: &PhasePointMap) -> Complex64 {
    c1 * c2.conj() * point.xi.exp() * (FRAC_2_PI / frame.cosh_2r.sqrt())
}

/// Wigner function of `c1 S(r)|0⟩ + c2 S(−r)|0⟩`.
pub fn wigner_ssv(frame: &SqueezeFrame, c1: Complex64, c2: Complex64, point: &PhasePointMap) -> f64 {
    2.0 * ssv_cross(frame, c1, c2, point).re
        + c1.norm_sqr() * wigner_svs(Branch::Plus, point)
        + c2.norm_sqr() * wigner_svs(Branch::Minus, point)
}

/// Log form of the single-branch Wigner value.
pub(crate) fn wigner_branch_log(
    op: Operation,
    n: usize,
    frame: &SqueezeFrame,
    branch: Branch,
    point: &PhasePointMap,
) -> Result<LogComplex> {
    frame.require_regular(n)?;
    let chi = point.chi(branch);
    if n == 0 {
        return Ok(LogComplex::exp_real(FRAC_2_PI.ln() + chi));
    }
    let s = branch.sign();
    let c = frame.hyperbolic_ratio(op);
    let root = Complex64::new(2.0 * s * c, 0.0).sqrt();
    let bar = point.alpha_bar(branch);
    let i = Complex64::i();
    let z = -i * root * bar;
    // formal conjugate: the root itself is not conjugated
    let z_tilde = i * root * bar.conj();
    let sum = hermite_pair_sum(n, Complex64::new(-2.0 * s * c, 0.0), z, z_tilde)?;
    let nf = n as f64;
    let pre = LogComplex::new(
        FRAC_2_PI.ln() + chi + nf * frame.sinh_2r.ln() - nf * 4f64.ln(),
        if s < 0.0 && n % 2 == 1 { PI } else { 0.0 },
    );
    Ok(pre * sum)
}

fn wigner_branch(op: Operation, n: usize, frame: &SqueezeFrame, branch: Branch, point: &PhasePointMap) -> Result<f64> {
    let v = wigner_branch_log(op, n, frame, branch, point)?.to_complex();
    finite(v.re, "single-branch Wigner sum")
}

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(crate::Error::NonFiniteTerm(what))
    }
}

/// Wigner function of `a†ⁿ S(±r)|0⟩`.
pub fn wigner_pasvs(n: usize, frame: &SqueezeFrame, branch: Branch, point: &PhasePointMap) -> Result<f64> {
    wigner_branch(Operation::Added, n, frame, branch, point)
}

/// Wigner function of `aⁿ S(±r)|0⟩`.
pub fn wigner_pssvs(n: usize, frame: &SqueezeFrame, branch: Branch, point: &PhasePointMap) -> Result<f64> {
    wigner_branch(Operation::Subtracted, n, frame, branch, point)
}

/// Interference term `c1 c2* ⟨ψ−|Δ(α)|ψ+⟩/π`; twice its real part enters the Wigner function.
pub fn superposition_cross(
    op: Operation,
    n: usize,
    frame: &SqueezeFrame,
    c1: Complex64,
    c2: Complex64,
    point: &PhasePointMap,
) -> Result<Complex64> {
    frame.require_regular(n)?;
    if c1.norm_sqr() == 0.0 || c2.norm_sqr() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if n == 0 {
        return Ok(ssv_cross(frame, c1, c2, point));
    }
    let i = Complex64::i();
    let (e, h1, h2) = match op {
        Operation::Added => {
            let w = frame.big_omega;
            (-2.0 * i * frame.coth_r, i * w * point.alpha_minus, -w * point.alpha_plus.conj())
        }
        Operation::Subtracted => {
            let w = frame.small_omega;
            (2.0 * i * frame.tanh_r, -w * point.alpha_minus, -i * w * point.alpha_plus.conj())
        }
    };
    let sum = hermite_pair_sum(n, e, h1, h2)?;
    let nf = n as f64;
    let scale = FRAC_2_PI.ln() + nf * frame.tanh_2r.ln()
        - nf * 4f64.ln()
        - frame.cosh_r.ln()
        - 0.5 * (1.0 + frame.tanh_r * frame.tanh_r).ln();
    // (−i)ⁿ contributes a phase of −nπ/2
    let pre = LogComplex::exp(point.xi) * LogComplex::new(scale, -nf * PI / 2.0);
    let weights = LogComplex::from_complex(c1 * c2.conj());
    let v = (pre * sum * weights).to_complex();
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(crate::Error::NonFiniteTerm("interference sum"));
    }
    Ok(v)
}

/// Interference term for the superposition of the two photon-added branches.
pub fn spasvs_cross(n: usize, frame: &SqueezeFrame, c1: Complex64, c2: Complex64, point: &PhasePointMap) -> Result<Complex64> {
    superposition_cross(Operation::Added, n, frame, c1, c2, point)
}

/// Interference term for the superposition of the two photon-subtracted branches.
pub fn spssvs_cross(n: usize, frame: &SqueezeFrame, c1: Complex64, c2: Complex64, point: &PhasePointMap) -> Result<Complex64> {
    superposition_cross(Operation::Subtracted, n, frame, c1, c2, point)
}

/// `|c1|² W₊ + |c2|² W₋`, the chessboard term.
pub fn wigner_mixture(
    op: Operation,
    n: usize,
    frame: &SqueezeFrame,
    c1: Complex64,
    c2: Complex64,
    point: &PhasePointMap,
) -> Result<f64> {
    let mut acc = 0.0;
    for (w, b) in [(c1.norm_sqr(), Branch::Plus), (c2.norm_sqr(), Branch::Minus)] {
        if w > 0.0 {
            acc += w * wigner_branch(op, n, frame, b, point)?;
        }
    }
    Ok(acc)
}

/// Wigner function of `c1 ψ+ + c2 ψ−`.
pub fn wigner_superposition(
    op: Operation,
    n: usize,
    frame: &SqueezeFrame,
    c1: Complex64,
    c2: Complex64,
    point: &PhasePointMap,
) -> Result<f64> {
    let cross = superposition_cross(op, n, frame, c1, c2, point)?;
    Ok(2.0 * cross.re + wigner_mixture(op, n, frame, c1, c2, point)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> SqueezeFrame {
        SqueezeFrame::new(0.5).unwrap()
    }

    #[test]
    fn zero_photons_reduce_to_gaussian() {
        let f = frame();
        for a in [Complex64::new(0.3, -0.4), Complex64::new(-1.2, 0.9)] {
            let p = PhasePointMap::new(a, &f);
            for b in [Branch::Plus, Branch::Minus] {
                let g = wigner_svs(b, &p);
                assert!((wigner_pasvs(0, &f, b, &p).unwrap() - g).abs() < 1e-15);
                assert!((wigner_pssvs(0, &f, b, &p).unwrap() - g).abs() < 1e-15);
            }
            let ratio = wigner_svs(Branch::Plus, &p) / FRAC_2_PI;
            assert!((ratio - p.chi_plus.exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn origin_sign_follows_parity() {
        let f = frame();
        let o = PhasePointMap::new(Complex64::new(0.0, 0.0), &f);
        for n in 0..=20 {
            let expect = if n % 2 == 0 { 1.0 } else { -1.0 };
            for b in [Branch::Plus, Branch::Minus] {
                assert_eq!(wigner_pasvs(n, &f, b, &o).unwrap().signum(), expect, "PA n={n}");
                assert_eq!(wigner_pssvs(n, &f, b, &o).unwrap().signum(), expect, "PS n={n}");
            }
        }
    }

    #[test]
    fn vanishing_weights_remove_cross_term() {
        let f = frame();
        let p = PhasePointMap::new(Complex64::new(0.2, 0.1), &f);
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(spasvs_cross(10, &f, z, one, &p).unwrap(), z);
        assert_eq!(spssvs_cross(10, &f, one, z, &p).unwrap(), z);
        let full = wigner_superposition(Operation::Added, 4, &f, one, z, &p).unwrap();
        assert_eq!(full, wigner_pasvs(4, &f, Branch::Plus, &p).unwrap());
    }

    #[test]
    fn real_part_doubles_consistently() {
        let f = frame();
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for a in [Complex64::new(0.4, 0.3), Complex64::new(-0.1, 1.1)] {
            let p = PhasePointMap::new(a, &f);
            let i = spasvs_cross(6, &f, c, c, &p).unwrap();
            let sum = i + i.conj();
            assert!((sum.re - 2.0 * i.re).abs() <= 1e-12 * i.norm().max(1e-300));
            assert!(sum.im.abs() <= 1e-12 * i.norm().max(1e-300));
        }
    }

    #[test]
    fn small_squeeze_scaling_of_interference() {
        // At the origin the n = 2 sum is 4 − 8 tanh²r, so the ratio to n = 0
        // is tanh²(2r)(1 − 2 tanh²r)/4 in magnitude.
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        for r in [0.05f64, 0.1] {
            let f = SqueezeFrame::new(r).unwrap();
            let p = PhasePointMap::new(Complex64::new(0.0, 0.0), &f);
            let i2 = spssvs_cross(2, &f, c, c, &p).unwrap();
            let i0 = spssvs_cross(0, &f, c, c, &p).unwrap();
            let t = r.tanh();
            let expect = (2.0 * r).tanh().powi(2) * (1.0 - 2.0 * t * t) / 4.0;
            assert!(((i2 / i0).norm() / expect - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn r_zero_is_singular_for_photons() {
        let f = SqueezeFrame::new(0.0).unwrap();
        let p = PhasePointMap::new(Complex64::new(0.1, 0.0), &f);
        assert!(wigner_pasvs(1, &f, Branch::Plus, &p).is_err());
        assert!((wigner_pasvs(0, &f, Branch::Plus, &p).unwrap() - FRAC_2_PI * (-0.02f64).exp()).abs() < 1e-15);
    }
}
