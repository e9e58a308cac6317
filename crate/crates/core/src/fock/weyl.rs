//! Wigner fields from the position-space wavefunction.
//!
//! For a pure state `W(x, p) = (2/π) ∫ ψ*(x+y) ψ(x−y) e^{2ipy} dy` on the
//! `tr[ρΔ]/π` scale. The integrand is smooth and decays like a Gaussian, so
//! the trapezoid rule converges spectrally once the step resolves the highest
//! frequency present, which is bounded by `√(2·cutoff+1) + |p|`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{DensityMatrix, FockVector};

const RESCALE_ABOVE: f64 = 1e150;
const MARGIN: f64 = 8.0;

/// Evaluates `Σ_k c_k φ_k(x)` for normalised Hermite functions `φ_k`.
///
/// The recurrence runs on rescaled values so that `e^{−x²/2}` never underflows
/// before the polynomial growth compensates it.
fn wavefunction(c: &[Complex64], x: f64) -> Complex64 {
    let mut log_scale = -0.5 * x * x - 0.25 * std::f64::consts::PI.ln();
    let mut p0 = 1.0f64;
    let mut p1 = std::f64::consts::SQRT_2 * x;
    let mut acc = c[0] * p0;
    if c.len() > 1 {
        acc += c[1] * p1;
    }
    for k in 1..c.len().saturating_sub(1) {
        let kf = k as f64;
        let p2 = (2.0 / (kf + 1.0)).sqrt() * x * p1 - (kf / (kf + 1.0)).sqrt() * p0;
        acc += c[k + 1] * p2;
        p0 = p1;
        p1 = p2;
        if p1.abs() > RESCALE_ABOVE {
            let f = 1.0 / RESCALE_ABOVE;
            p0 *= f;
            p1 *= f;
            acc *= f;
            log_scale += RESCALE_ABOVE.ln();
        }
    }
    acc * log_scale.exp()
}

/// Probability density `⟨x|ρ|x⟩` in the `x = √2 Re α` coordinate.
pub fn position_density(rho: &DensityMatrix, x: f64) -> f64 {
    rho.ensemble()
        .iter()
        .map(|(w, v)| w * wavefunction(v.amplitudes(), x).norm_sqr())
        .sum()
}

/// Wigner values on the tensor grid `xs × ps`, row-major with `x` slowest.
pub fn wigner_grid(rho: &DensityMatrix, xs: &[f64], ps: &[f64]) -> Vec<f64> {
    let p_max = ps.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let mut out = vec![0.0; xs.len() * ps.len()];
    for (w, v) in rho.ensemble() {
        let rows: Vec<Vec<f64>> = xs.par_iter().map(|&x| pure_row(v, x, ps, p_max)).collect();
        for (i, row) in rows.iter().enumerate() {
            for (j, val) in row.iter().enumerate() {
                out[i * ps.len() + j] += w * val;
            }
        }
    }
    out
}

fn pure_row(v: &FockVector, x: f64, ps: &[f64], p_max: f64) -> Vec<f64> {
    let c = v.amplitudes();
    let bandwidth = (2.0 * c.len() as f64 + 1.0).sqrt();
    let reach = bandwidth + MARGIN;
    let h = std::f64::consts::PI / (bandwidth + p_max + MARGIN);
    let half = reach - x.abs();
    if half <= 0.0 {
        return vec![0.0; ps.len()];
    }
    let steps = (half / h).ceil() as usize;
    let f0 = wavefunction(c, x).norm_sqr();
    let samples: Vec<(f64, Complex64)> = (1..=steps)
        .map(|j| {
            let y = j as f64 * h;
            (y, wavefunction(c, x + y).conj() * wavefunction(c, x - y))
        })
        .collect();
    ps.iter()
        .map(|&p| {
            let s: f64 = samples
                .iter()
                .map(|(y, f)| (f * Complex64::from_polar(1.0, 2.0 * p * y)).re)
                .sum();
            std::f64::consts::FRAC_2_PI * h * (f0 + 2.0 * s)
        })
        .collect()
}

/// `tr[ρ D(δα) ρ D†(δα)]` on the tensor grid `dxs × dps`, row-major with `δx` slowest.
///
/// Uses `⟨u|D(δα)|v⟩ = ∫ u*(x) v(x − δx) e^{iδp(x − δx/2)} dx`; the constant
/// phase drops out of the modulus.
pub fn overlap_grid(rho: &DensityMatrix, dxs: &[f64], dps: &[f64]) -> Vec<f64> {
    let ens = rho.ensemble();
    let cutoff = ens.iter().map(|(_, v)| v.cutoff()).max().unwrap_or(1);
    let bandwidth = (2.0 * cutoff as f64 + 1.0).sqrt();
    let reach = bandwidth + MARGIN;
    let p_max = dps.iter().fold(0.0f64, |m, p| m.max(p.abs()));
    let h = std::f64::consts::PI / (bandwidth + 0.5 * p_max + MARGIN);
    let count = (2.0 * reach / h).ceil() as usize + 1;
    let nodes: Vec<f64> = (0..count).map(|j| -reach + j as f64 * h).collect();
    let bra: Vec<Vec<Complex64>> = ens
        .iter()
        .map(|(_, v)| nodes.iter().map(|&x| wavefunction(v.amplitudes(), x).conj()).collect())
        .collect();
    let rows: Vec<Vec<f64>> = dxs
        .par_iter()
        .map(|&dx| {
            let ket: Vec<Vec<Complex64>> = ens
                .iter()
                .map(|(_, v)| nodes.iter().map(|&x| wavefunction(v.amplitudes(), x - dx)).collect())
                .collect();
            let mut products = Vec::with_capacity(ens.len() * ens.len());
            for (k, (wk, _)) in ens.iter().enumerate() {
                for (l, (wl, _)) in ens.iter().enumerate() {
                    let f: Vec<Complex64> = bra[k].iter().zip(&ket[l]).map(|(a, b)| a * b).collect();
                    products.push((wk * wl, f));
                }
            }
            dps.iter()
                .map(|&dp| {
                    let phases: Vec<Complex64> = nodes.iter().map(|&x| Complex64::from_polar(1.0, dp * x)).collect();
                    products
                        .iter()
                        .map(|(w, f)| {
                            let a: Complex64 = f.iter().zip(&phases).map(|(f, e)| f * e).sum();
                            w * (a * h).norm_sqr()
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    rows.concat()
}

#[cfg(test)]
mod tests {
    use super::super::{
        coherent_state, overlap_displaced, photon_added_squeezed, photon_subtracted_squeezed, wigner_point, CutoffPolicy,
    };
    use super::*;
    use crate::Branch;

    #[test]
    fn ground_state_wavefunction() {
        let c = [Complex64::new(1.0, 0.0)];
        let x: f64 = 0.8;
        let expect = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
        assert!((wavefunction(&c, x).re - expect).abs() < 1e-15);
    }

    #[test]
    fn far_tail_does_not_underflow_early() {
        // φ_900 peaks near √1801 ≈ 42, where e^{−x²/2} alone is ~1e-385
        let mut c = vec![Complex64::new(0.0, 0.0); 901];
        c[900] = Complex64::new(1.0, 0.0);
        let v = wavefunction(&c, 42.0).norm();
        assert!(v > 1e-3 && v.is_finite(), "{v}");
    }

    #[test]
    fn grid_matches_displaced_parity() {
        let state = photon_added_squeezed(5, 0.5, Branch::Minus, &CutoffPolicy::for_photons(5)).unwrap();
        let rho = DensityMatrix::from_pure(&state).unwrap();
        let xs = [-2.5, -0.3, 0.0, 1.7];
        let ps = [-1.1, 0.0, 0.4, 3.0];
        let grid = wigner_grid(&rho, &xs, &ps);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &p) in ps.iter().enumerate() {
                let direct = wigner_point(&rho, crate::alpha_from_xp(x, p)).unwrap();
                assert!((grid[i * ps.len() + j] - direct).abs() < 1e-11, "({x}, {p})");
            }
        }
    }

    #[test]
    fn coherent_grid_is_displaced_gaussian() {
        let a = crate::alpha_from_xp(1.0, -0.5);
        let rho = DensityMatrix::from_pure(&coherent_state(a, &CutoffPolicy::default()).unwrap()).unwrap();
        let xs = [0.0, 1.0, 2.2];
        let ps = [-0.5, 0.7];
        let grid = wigner_grid(&rho, &xs, &ps);
        for (i, &x) in xs.iter().enumerate() {
            for (j, &p) in ps.iter().enumerate() {
                let g = std::f64::consts::FRAC_2_PI * (-(x - 1.0f64).powi(2) - (p + 0.5f64).powi(2)).exp();
                assert!((grid[i * ps.len() + j] - g).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn overlap_grid_matches_matrix_elements() {
        let plus = photon_subtracted_squeezed(3, 0.5, Branch::Plus, &CutoffPolicy::for_photons(3)).unwrap();
        let minus = photon_subtracted_squeezed(3, 0.5, Branch::Minus, &CutoffPolicy::for_photons(3)).unwrap();
        let rho = super::super::mix(0.3, &plus, 0.7, &minus).unwrap();
        let dxs = [-0.9, 0.0, 0.35];
        let dps = [-0.2, 0.0, 1.1];
        let grid = overlap_grid(&rho, &dxs, &dps);
        for (i, &dx) in dxs.iter().enumerate() {
            for (j, &dp) in dps.iter().enumerate() {
                let direct = overlap_displaced(&rho, crate::alpha_from_xp(dx, dp)).unwrap();
                assert!((grid[i * dps.len() + j] - direct).abs() < 1e-11, "({dx}, {dp})");
            }
        }
    }
}
