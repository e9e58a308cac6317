use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::ln_factorial;
use crate::{Error, Result};

const RESCALE_ABOVE: f64 = 1e100;

/// A complex number stored as `exp(log_magnitude + i·phase)`.
///
/// Zero is represented by `log_magnitude = −∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex { log_magnitude: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: LogComplex = LogComplex { log_magnitude: 0.0, phase: 0.0 };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        Self { log_magnitude, phase }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        Self { log_magnitude: z.norm().ln(), phase: z.arg() }
    }

    /// Positive real `exp(x)`.
    pub fn exp_real(x: f64) -> Self {
        Self { log_magnitude: x, phase: 0.0 }
    }

    /// `exp(z)` for complex `z`.
    pub fn exp(z: Complex64) -> Self {
        Self { log_magnitude: z.re, phase: z.im }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    pub fn powu(self, k: u32) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        Self { log_magnitude: self.log_magnitude * k as f64, phase: self.phase * k as f64 }
    }

    pub fn conj(self) -> Self {
        Self { log_magnitude: self.log_magnitude, phase: -self.phase }
    }
}

impl std::ops::Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex { log_magnitude: self.log_magnitude + rhs.log_magnitude, phase: self.phase + rhs.phase }
    }
}

impl std::ops::Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() {
            return LogComplex::ZERO;
        }
        LogComplex { log_magnitude: self.log_magnitude - rhs.log_magnitude, phase: self.phase - rhs.phase }
    }
}

/// Compensated complex summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct KahanSum {
    sum: Complex64,
    carry: Complex64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: Complex64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> Complex64 {
        self.sum
    }
}

/// `H_0(z), …, H_n(z)` (physicists' Hermite polynomials) in log form.
///
/// Runs `H_{k+1} = 2z H_k − 2k H_{k−1}` on a rescaled pair so that large
/// degrees and arguments never overflow.
pub fn hermite_sequence(n: usize, z: Complex64) -> Vec<LogComplex> {
    let mut out = Vec::with_capacity(n + 1);
    let mut scale = 0.0f64;
    let mut h0 = Complex64::new(1.0, 0.0);
    let mut h1 = z * 2.0;
    out.push(LogComplex::ONE);
    if n == 0 {
        return out;
    }
    out.push(LogComplex::from_complex(h1));
    for k in 1..n {
        let h2 = z * 2.0 * h1 - h0 * (2.0 * k as f64);
        h0 = h1;
        h1 = h2;
        let m = h1.norm().max(h0.norm());
        if m > RESCALE_ABOVE {
            h0 /= m;
            h1 /= m;
            scale += m.ln();
        }
        let mut l = LogComplex::from_complex(h1);
        l.log_magnitude += scale;
        out.push(l);
    }
    out
}

/// `H_n(z)` in log form.
pub fn hermite(n: usize, z: Complex64) -> LogComplex {
    *hermite_sequence(n, z).last().expect("sequence has n + 1 entries")
}

/// `Σ_{l=0}^{n} (n!)² / (l! ((n−l)!)²) · eˡ · H_{n−l}(z1) H_{n−l}(z2)`.
///
/// Every summand is assembled in log space from log-factorials; the sum is
/// then taken in linear space relative to the largest term with compensated
/// addition, since consecutive terms can alternate in sign.
pub fn hermite_pair_sum(n: usize, e: Complex64, z1: Complex64, z2: Complex64) -> Result<LogComplex> {
    let h1 = hermite_sequence(n, z1);
    let h2 = hermite_sequence(n, z2);
    let le = LogComplex::from_complex(e);
    let ln_nf = ln_factorial(n);
    let terms: Vec<LogComplex> = (0..=n)
        .map(|l| {
            let k = n - l;
            let w = LogComplex::exp_real(2.0 * ln_nf - ln_factorial(l) - 2.0 * ln_factorial(k));
            w * le.powu(l as u32) * h1[k] * h2[k]
        })
        .collect();
    if terms.iter().any(|t| t.log_magnitude.is_nan() || t.log_magnitude == f64::INFINITY) {
        return Err(Error::NonFiniteTerm("Hermite pair sum"));
    }
    let peak = terms.iter().map(|t| t.log_magnitude).fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Ok(LogComplex::ZERO);
    }
    let mut acc = KahanSum::default();
    for t in &terms {
        if !t.is_zero() {
            acc.add(Complex64::from_polar((t.log_magnitude - peak).exp(), t.phase));
        }
    }
    let mut out = LogComplex::from_complex(acc.value());
    if !out.is_zero() {
        out.log_magnitude += peak;
    }
    Ok(out)
}
