use std::sync::OnceLock;

const TABLE_LEN: usize = 8192;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..TABLE_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(k!)`, exact summation below 8192 and Stirling's series above.
pub(crate) fn ln_factorial(k: usize) -> f64 {
    if k < TABLE_LEN {
        return table()[k];
    }
    let x = k as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn stirling_joins_table() {
        let exact: f64 = (1..=9000).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(9000) - exact).abs() / exact < 1e-13);
    }
}
