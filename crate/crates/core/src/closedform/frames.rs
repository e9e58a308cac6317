use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Branch, Error, Operation, Result};

/// Hyperbolic functions of the squeeze parameter shared by every formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeFrame {
    pub r: f64,
    pub cosh_r: f64,
    pub sinh_r: f64,
    pub tanh_r: f64,
    /// Infinite at `r = 0`.
    pub coth_r: f64,
    pub cosh_2r: f64,
    pub sinh_2r: f64,
    pub tanh_2r: f64,
    pub sech_2r: f64,
    /// `√tanh 2r / sinh r`; infinite at `r = 0`.
    pub big_omega: f64,
    /// `√tanh 2r / cosh r`.
    pub small_omega: f64,
}

impl SqueezeFrame {
    /// Accepts `0 ≤ r ≤ 3`.
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=3.0).contains(&r) {
            return Err(Error::InvalidInput(format!("squeeze parameter {r} outside [0, 3]")));
        }
        let (sinh_r, cosh_r) = (r.sinh(), r.cosh());
        let tanh_2r = (2.0 * r).tanh();
        Ok(Self {
            r,
            cosh_r,
            sinh_r,
            tanh_r: r.tanh(),
            coth_r: 1.0 / r.tanh(),
            cosh_2r: (2.0 * r).cosh(),
            sinh_2r: (2.0 * r).sinh(),
            tanh_2r,
            sech_2r: 1.0 / (2.0 * r).cosh(),
            big_omega: if r == 0.0 { f64::INFINITY } else { tanh_2r.sqrt() / sinh_r },
            small_omega: tanh_2r.sqrt() / cosh_r,
        })
    }

    /// `coth r` for addition, `tanh r` for subtraction.
    pub fn hyperbolic_ratio(&self, op: Operation) -> f64 {
        match op {
            Operation::Added => self.coth_r,
            Operation::Subtracted => self.tanh_r,
        }
    }

    /// Rejects `r = 0` whenever photons are added or removed.
    pub(crate) fn require_regular(&self, n: usize) -> Result<()> {
        if self.r == 0.0 && n > 0 {
            return Err(Error::SingularParameter(format!(
                "r = 0 with n = {n}: coth r diverges (use n = 0 for the Gaussian case)"
            )));
        }
        Ok(())
    }
}

/// Phase-space point with its images under the two squeeze branches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePointMap {
    pub alpha: Complex64,
    /// `α cosh r − α* sinh r`.
    pub alpha_bar_plus: Complex64,
    /// `α cosh r + α* sinh r`.
    pub alpha_bar_minus: Complex64,
    /// `α* sinh r + α cosh r`.
    pub alpha_plus: Complex64,
    /// `α* sinh r − α cosh r`.
    pub alpha_minus: Complex64,
    /// `sinh 2r (α*² + α²) − 2|α|² cosh 2r`.
    pub chi_plus: f64,
    /// `−sinh 2r (α*² + α²) − 2|α|² cosh 2r`.
    pub chi_minus: f64,
    /// `−tanh 2r (α² − α*²) − 2|α|² sech 2r`; complex because `α² − α*²` is imaginary.
    pub xi: Complex64,
}

impl PhasePointMap {
    pub fn new(alpha: Complex64, f: &SqueezeFrame) -> Self {
        let ac = alpha.conj();
        let a2 = alpha * alpha;
        let ac2 = ac * ac;
        let mod2 = alpha.norm_sqr();
        let sym = (ac2 + a2).re;
        Self {
            alpha,
            alpha_bar_plus: alpha * f.cosh_r - ac * f.sinh_r,
            alpha_bar_minus: alpha * f.cosh_r + ac * f.sinh_r,
            alpha_plus: ac * f.sinh_r + alpha * f.cosh_r,
            alpha_minus: ac * f.sinh_r - alpha * f.cosh_r,
            chi_plus: f.sinh_2r * sym - 2.0 * mod2 * f.cosh_2r,
            chi_minus: -f.sinh_2r * sym - 2.0 * mod2 * f.cosh_2r,
            xi: -(a2 - ac2) * f.tanh_2r - 2.0 * mod2 * f.sech_2r,
        }
    }

    pub fn alpha_bar(&self, b: Branch) -> Complex64 {
        match b {
            Branch::Plus => self.alpha_bar_plus,
            Branch::Minus => self.alpha_bar_minus,
        }
    }

    pub fn chi(&self, b: Branch) -> f64 {
        match b {
            Branch::Plus => self.chi_plus,
            Branch::Minus => self.chi_minus,
        }
    }
}

/// Displacement with its squeezed images and Hermite arguments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisplacementFrame {
    pub delta_alpha: Complex64,
    /// `δα cosh r − δα* sinh r`.
    pub eta_plus: Complex64,
    /// `δα cosh r + δα* sinh r`.
    pub eta_minus: Complex64,
    /// `i √(coth r / 2) η₊`.
    pub big_theta_plus: Complex64,
    /// `i √(−coth r / 2) η₋` (principal root).
    pub big_theta_minus: Complex64,
    /// `i √(tanh r / 2) η₊`.
    pub small_theta_plus: Complex64,
    /// `i √(−tanh r / 2) η₋` (principal root).
    pub small_theta_minus: Complex64,
}

impl DisplacementFrame {
    pub fn new(delta_alpha: Complex64, f: &SqueezeFrame) -> Self {
        let dc = delta_alpha.conj();
        let eta_plus = delta_alpha * f.cosh_r - dc * f.sinh_r;
        let eta_minus = delta_alpha * f.cosh_r + dc * f.sinh_r;
        let i = Complex64::i();
        let root = |x: f64| Complex64::new(x, 0.0).sqrt();
        Self {
            delta_alpha,
            eta_plus,
            eta_minus,
            big_theta_plus: i * root(0.5 * f.coth_r) * eta_plus,
            big_theta_minus: i * root(-0.5 * f.coth_r) * eta_minus,
            small_theta_plus: i * root(0.5 * f.tanh_r) * eta_plus,
            small_theta_minus: i * root(-0.5 * f.tanh_r) * eta_minus,
        }
    }

    pub fn eta(&self, b: Branch) -> Complex64 {
        match b {
            Branch::Plus => self.eta_plus,
            Branch::Minus => self.eta_minus,
        }
    }

    /// Hermite argument for the given operation and branch.
    pub fn theta(&self, op: Operation, b: Branch) -> Complex64 {
        match (op, b) {
            (Operation::Added, Branch::Plus) => self.big_theta_plus,
            (Operation::Added, Branch::Minus) => self.big_theta_minus,
            (Operation::Subtracted, Branch::Plus) => self.small_theta_plus,
            (Operation::Subtracted, Branch::Minus) => self.small_theta_minus,
        }
    }
}
