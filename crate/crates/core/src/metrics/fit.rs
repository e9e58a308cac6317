use serde::{Deserialize, Serialize};

/// Ordinary least squares of `ln y` on `ln x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; needs at least three points.
    pub std_error: Option<f64>,
    pub points: usize,
}

/// Returns `None` with fewer than two usable points or no spread in `x`.
pub fn log_log_fit(points: &[(f64, f64)]) -> Option<LogLogFit> {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len();
    if m < 2 {
        return None;
    }
    let mf = m as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let std_error = (m > 2).then(|| {
        let ssr: f64 = logs.iter().map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (ssr / (mf - 2.0) / sxx).sqrt()
    });
    Some(LogLogFit { slope, intercept, std_error, points: m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [4.0, 6.0, 8.0, 16.0].iter().map(|&x| (x, 3.0 / x)).collect();
        let f = log_log_fit(&pts).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.std_error.unwrap() < 1e-12);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(log_log_fit(&[(1.0, 1.0)]).is_none());
        assert!(log_log_fit(&[(2.0, 1.0), (2.0, 3.0)]).is_none());
        assert!(log_log_fit(&[(1.0, 1.0), (2.0, 3.0)]).unwrap().std_error.is_none());
    }
}
