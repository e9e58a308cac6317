//! Squared norms and branch inner products from number-basis series.
//!
//! With `S(±r)|0⟩ = Σ_m (±t)^m √(2m)!/(2^m m!) |2m⟩ / √cosh r`, `t = tanh r`,
//! the ladder operators act diagonally and every quantity reduces to a
//! one-dimensional series with ratio tending to `t²`.

use super::frames::SqueezeFrame;
use super::hermite::{KahanSum, LogComplex};
use crate::special::ln_factorial;
use crate::{Error, Operation, Result};

use num_complex::Complex64;

const MAX_TERMS: usize = 200_000;
/// Terms this far below the running peak (in natural log) are dropped.
const NEGLIGIBLE: f64 = 45.0;

/// Log-magnitude of the `m`-th term without sign, or `None` if it vanishes.
fn log_term(op: Operation, n: usize, ln_t2: f64, m: usize) -> Option<f64> {
    let mf = m as f64;
    let geo = if m == 0 { 0.0 } else { mf * ln_t2 };
    if geo == f64::NEG_INFINITY {
        return None;
    }
    match op {
        Operation::Added => Some(geo + ln_factorial(2 * m + n) - mf * 4f64.ln() - 2.0 * ln_factorial(m)),
        Operation::Subtracted => {
            if 2 * m < n {
                return None;
            }
            Some(geo + 2.0 * ln_factorial(2 * m) - mf * 4f64.ln() - 2.0 * ln_factorial(m) - ln_factorial(2 * m - n))
        }
    }
}

fn series(op: Operation, n: usize, frame: &SqueezeFrame, alternating: bool) -> Result<LogComplex> {
    let ln_t2 = 2.0 * frame.tanh_r.ln();
    let mut logs = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    let mut m = 0;
    loop {
        if m > MAX_TERMS {
            return Err(Error::NonFiniteTerm("norm series did not converge"));
        }
        if let Some(l) = log_term(op, n, ln_t2, m) {
            if !l.is_finite() {
                return Err(Error::NonFiniteTerm("norm series"));
            }
            let past_growth = !logs.is_empty() && l < logs.last().map(|(_, v)| *v).unwrap_or(l);
            peak = peak.max(l);
            logs.push((m, l));
            if past_growth && l < peak - NEGLIGIBLE {
                break;
            }
        }
        if frame.tanh_r == 0.0 {
            // only the vacuum component survives
            break;
        }
        m += 1;
    }
    if peak == f64::NEG_INFINITY {
        return Ok(LogComplex::ZERO);
    }
    let mut acc = KahanSum::default();
    for (m, l) in logs {
        let sign = if alternating && m % 2 == 1 { -1.0 } else { 1.0 };
        acc.add(Complex64::new(sign * (l - peak).exp(), 0.0));
    }
    let mut out = LogComplex::from_complex(acc.value());
    if !out.is_zero() {
        out.log_magnitude += peak - frame.cosh_r.ln();
    }
    Ok(out)
}

/// `‖op^n S(±r)|0⟩‖²`, identical for both branches.
pub fn branch_norm_sq(op: Operation, n: usize, frame: &SqueezeFrame) -> Result<LogComplex> {
    let out = series(op, n, frame, false)?;
    if out.is_zero() {
        return Err(Error::ZeroNorm);
    }
    Ok(out)
}

/// `⟨ψ+|ψ−⟩` for `ψ± = op^n S(±r)|0⟩`; real, and tiny compared with the norm for large `n`.
pub fn branch_inner_product(op: Operation, n: usize, frame: &SqueezeFrame) -> Result<LogComplex> {
    series(op, n, frame, true)
}

/// `‖c1 ψ+ + c2 ψ−‖²`.
pub fn superposition_norm_sq(
    op: Operation,
    n: usize,
    frame: &SqueezeFrame,
    c1: Complex64,
    c2: Complex64,
) -> Result<LogComplex> {
    let norm = branch_norm_sq(op, n, frame)?;
    let ratio = (branch_inner_product(op, n, frame)? / norm).to_complex().re;
    let rel = c1.norm_sqr() + c2.norm_sqr() + 2.0 * (c1.conj() * c2).re * ratio;
    if !(rel > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok(norm * LogComplex::exp_real(rel.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_cases() {
        let f = SqueezeFrame::new(0.5).unwrap();
        let n0 = branch_norm_sq(Operation::Added, 0, &f).unwrap().to_complex().re;
        assert!((n0 - 1.0).abs() < 1e-14);
        let x = branch_inner_product(Operation::Added, 0, &f).unwrap().to_complex().re;
        assert!((x - 1.0 / f.cosh_2r.sqrt()).abs() < 1e-14);
        let x = branch_inner_product(Operation::Subtracted, 0, &f).unwrap().to_complex().re;
        assert!((x - 1.0 / f.cosh_2r.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn unsqueezed_number_states() {
        let f = SqueezeFrame::new(0.0).unwrap();
        let n = branch_norm_sq(Operation::Added, 5, &f).unwrap().to_complex().re;
        assert!((n - 120.0).abs() < 1e-10);
        assert!(branch_norm_sq(Operation::Subtracted, 2, &f).is_err());
    }

    #[test]
    fn one_photon_moments() {
        // ⟨a a†⟩ = 1 + sinh²r and ⟨a† a⟩ = sinh²r on the squeezed vacuum
        let f = SqueezeFrame::new(0.8).unwrap();
        let pa = branch_norm_sq(Operation::Added, 1, &f).unwrap().to_complex().re;
        let ps = branch_norm_sq(Operation::Subtracted, 1, &f).unwrap().to_complex().re;
        assert!((pa - (1.0 + f.sinh_r * f.sinh_r)).abs() < 1e-13);
        assert!((ps - f.sinh_r * f.sinh_r).abs() < 1e-13);
    }

    #[test]
    fn cancelling_weights_have_positive_norm() {
        let f = SqueezeFrame::new(0.5).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = superposition_norm_sq(Operation::Added, 10, &f, Complex64::new(h, 0.0), Complex64::new(-h, 0.0))
            .unwrap();
        assert!(v.to_complex().re > 0.0);
    }
}
