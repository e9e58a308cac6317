//! Matrix exponentials on the truncated number basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

const TAYLOR_EPS: f64 = 1e-18;
const MAX_TERMS: usize = 80;

/// `exp(G) v` for a generator supplied as a matrix-vector product.
///
/// The generator is scaled by the number of substeps so that each substep has
/// norm at most one; each substep is a Taylor series summed to machine
/// precision. `norm_bound` must bound the 1-norm of `G`.
pub(crate) fn expm_action<F>(apply: F, norm_bound: f64, v: &[Complex64]) -> Vec<Complex64>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let dim = v.len();
    let steps = norm_bound.ceil().max(1.0) as usize;
    let scale = 1.0 / steps as f64;

    let mut state = v.to_vec();
    let mut term = vec![Complex64::new(0.0, 0.0); dim];
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    for _ in 0..steps {
        term.copy_from_slice(&state);
        let base = l2(&state);
        if base == 0.0 {
            break;
        }
        for k in 1..MAX_TERMS {
            next.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            apply(&term, &mut next);
            let factor = scale / k as f64;
            for (t, n) in term.iter_mut().zip(&next) {
                *t = n * factor;
            }
            for (s, t) in state.iter_mut().zip(&term) {
                *s += t;
            }
            if l2(&term) <= TAYLOR_EPS * base {
                break;
            }
        }
    }
    state
}

/// Dense `exp(A)` by scaling and squaring with a Taylor core.
pub(crate) fn expm_dense(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > 0.5 {
        squarings += 1;
    }
    let scaled = a.map(|z| z / 2f64.powi(squarings as i32));

    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..MAX_TERMS {
        term = &term * &scaled;
        term.iter_mut().for_each(|z| *z /= k as f64);
        result += &term;
        if one_norm(&term) <= TAYLOR_EPS {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_matches_rotation() {
        // exp([[0, -t], [t, 0]]) is a rotation by t.
        let t = 2.7;
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(-t, 0.0),
                Complex64::new(t, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let e = expm_dense(&a);
        assert!((e[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - t.sin()).abs() < 1e-14);
        assert!((e[(0, 1)].re + t.sin()).abs() < 1e-14);
    }

    #[test]
    fn action_matches_dense() {
        let n = 12;
        let mut a = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n - 1 {
            let w = ((i + 1) as f64).sqrt();
            a[(i + 1, i)] = Complex64::new(0.3, 0.7) * w;
            a[(i, i + 1)] = -Complex64::new(0.3, -0.7) * w;
        }
        let v: Vec<Complex64> = (0..n).map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.1 * k as f64)).collect();
        let dense = expm_dense(&a) * nalgebra::DVector::from_vec(v.clone());
        let apply = |x: &[Complex64], out: &mut [Complex64]| {
            let y = &a * nalgebra::DVector::from_column_slice(x);
            out.copy_from_slice(y.as_slice());
        };
        let act = expm_action(apply, one_norm(&a), &v);
        for (d, s) in dense.iter().zip(&act) {
            assert!((d - s).norm() < 1e-12);
        }
    }
}
