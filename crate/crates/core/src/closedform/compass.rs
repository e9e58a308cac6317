//! The four-component compass state `|x0/√2⟩ + |−x0/√2⟩ + |i x0/√2⟩ + |−i x0/√2⟩`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_2_PI, SQRT_2};

use num_complex::Complex64;

use crate::{Error, Result};

/// `e^{−(x−x0)² − (p−p0)²}`.
pub fn gaussian(x: f64, p: f64, x0: f64, p0: f64) -> f64 {
    (-(x - x0).powi(2) - (p - p0).powi(2)).exp()
}

fn xp(alpha: Complex64) -> (f64, f64) {
    (SQRT_2 * alpha.re, SQRT_2 * alpha.im)
}

/// Four Gaussian lobes at distance `x0` along the axes.
pub fn compass_lobes(x0: f64, alpha: Complex64) -> f64 {
    let (x, p) = xp(alpha);
    gaussian(x, p, x0, 0.0) + gaussian(x, p, -x0, 0.0) + gaussian(x, p, 0.0, x0) + gaussian(x, p, 0.0, -x0)
}

/// Fringes between neighbouring lobes, `½ Σ I(±x, ±p)`.
pub fn compass_fringes(x0: f64, alpha: Complex64) -> f64 {
    let (x, p) = xp(alpha);
    let term = |x: f64, p: f64| gaussian(x, p, 0.5 * x0, 0.5 * x0) * (x0 * (x + p - 0.5 * x0)).cos();
    0.5 * (term(x, p) + term(-x, p) + term(x, -p) + term(-x, -p))
}

/// Central chessboard `½ e^{−x²−p²} [cos 2x0x + cos 2x0p]`.
pub fn compass_chessboard(x0: f64, alpha: Complex64) -> f64 {
    let (x, p) = xp(alpha);
    0.5 * gaussian(x, p, 0.0, 0.0) * ((2.0 * x0 * x).cos() + (2.0 * x0 * p).cos())
}

/// Wigner function of the unnormalised compass state.
///
/// Each pair of coherent components contributes twice the real part of its
/// interference term, which fixes the relative weight of the three pieces.
pub fn wigner_compass(x0: f64, alpha: Complex64) -> Result<f64> {
    check_x0(x0)?;
    Ok(FRAC_2_PI * (compass_lobes(x0, alpha) + 4.0 * compass_fringes(x0, alpha) + 4.0 * compass_chessboard(x0, alpha)))
}

/// Wigner function of a coherent state centred at `(x0, p0)`.
pub fn wigner_coherent(x0: f64, p0: f64, alpha: Complex64) -> f64 {
    let (x, p) = xp(alpha);
    FRAC_2_PI * gaussian(x, p, x0, p0)
}

fn check_x0(x0: f64) -> Result<()> {
    if x0.is_finite() && x0 > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("compass separation x0 = {x0} must be positive")))
    }
}

fn components(x0: f64) -> [Complex64; 4] {
    let a = x0 * FRAC_1_SQRT_2;
    [Complex64::new(a, 0.0), Complex64::new(-a, 0.0), Complex64::new(0.0, a), Complex64::new(0.0, -a)]
}

/// `⟨a|b⟩` for coherent states.
fn coherent_inner(a: Complex64, b: Complex64) -> Complex64 {
    (a.conj() * b - 0.5 * a.norm_sqr() - 0.5 * b.norm_sqr()).exp()
}

/// `‖ψ‖² = 4 + 4e^{−x0²} + 8e^{−x0²/2} cos(x0²/2)`.
pub fn compass_norm_sq(x0: f64) -> f64 {
    let q = x0 * x0;
    4.0 + 4.0 * (-q).exp() + 8.0 * (-0.5 * q).exp() * (0.5 * q).cos()
}

/// Exact normalised `|⟨ψ|D(δα)|ψ⟩|²` from coherent-state algebra.
pub fn overlap_compass(x0: f64, delta_alpha: Complex64) -> Result<f64> {
    check_x0(x0)?;
    let pts = components(x0);
    let mut acc = Complex64::new(0.0, 0.0);
    for a in pts {
        for b in pts {
            // D(δ)|b⟩ = e^{(δ b* − δ* b)/2} |b + δ⟩
            let phase = 0.5 * (delta_alpha * b.conj() - delta_alpha.conj() * b);
            acc += phase.exp() * coherent_inner(a, b + delta_alpha);
        }
    }
    Ok(acc.norm_sqr() / compass_norm_sq(x0).powi(2))
}

/// Large-separation, small-displacement approximation
/// `¼ e^{−|δα|²} [cos(x0 δx) + cos(x0 δp)]²`.
pub fn overlap_compass_approx(x0: f64, dx: f64, dp: f64) -> f64 {
    let d2 = 0.5 * (dx * dx + dp * dp);
    0.25 * (-d2).exp() * ((x0 * dx).cos() + (x0 * dp).cos()).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn chessboard_dominates_origin() {
        let a = Complex64::new(0.0, 0.0);
        assert!((compass_chessboard(4.0, a) - 1.0).abs() < 1e-15);
        let w = wigner_compass(4.0, a).unwrap() / FRAC_2_PI;
        // fringes leak e^{−x0²/2} into the centre
        assert!((w - 4.0).abs() < 1e-2);
    }

    #[test]
    fn chessboard_zero_along_x() {
        // with p = 0 the bracket is cos(2x0 x) + 1, vanishing first at x = π/(2x0)
        let x0 = 6.0;
        let x = PI / (2.0 * x0);
        let before = compass_chessboard(x0, crate::alpha_from_xp(x - 1e-3, 0.0));
        let at = compass_chessboard(x0, crate::alpha_from_xp(x, 0.0));
        assert!(before > 0.0 && at.abs() < 1e-12);
    }

    #[test]
    fn approx_zero_on_diagonal() {
        assert_eq!(overlap_compass_approx(12.0, 0.0, 0.0), 1.0);
        assert!(overlap_compass_approx(12.0, PI / 12.0, 0.0).abs() < 1e-30);
        let t = PI / 24.0;
        assert!(overlap_compass_approx(12.0, t, t).abs() < 1e-30);
    }

    #[test]
    fn exact_overlap_normalised_and_small_at_first_zero() {
        assert!((overlap_compass(12.0, Complex64::new(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-14);
        let t = PI / 24.0;
        assert!(overlap_compass(12.0, crate::alpha_from_xp(t, t)).unwrap() < 1e-3);
    }

    #[test]
    fn norm_matches_pairwise_sum() {
        for x0 in [0.5, 2.0, 4.0] {
            let pts = components(x0);
            let direct: Complex64 = pts.iter().flat_map(|a| pts.iter().map(move |b| coherent_inner(*a, *b))).sum();
            assert!((direct.re - compass_norm_sq(x0)).abs() < 1e-13);
        }
    }
}
