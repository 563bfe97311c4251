//! Least-squares fits on log–log data.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    /// `log y ≈ intercept + slope · log x`, natural logarithms.
    pub intercept: f64,
    pub points: usize,
}

impl LogLogFit {
    pub fn constant(&self) -> f64 {
        self.intercept.exp()
    }

    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Fits `y = C x^p` over the points with `x, y > 0`; `None` if fewer than two remain.
pub fn loglog_fit(xs: &[f64], ys: &[f64]) -> Option<LogLogFit> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(LogLogFit { slope, intercept: my - slope * mx, points: pts.len() })
}

/// `max r / min r - 1` over the ratios `r = y / x^p`.
pub fn ratio_drift(xs: &[f64], ys: &[f64], p: f64) -> f64 {
    let r: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y / x.powf(p)).collect();
    let hi = r.iter().cloned().fold(f64::MIN, f64::max);
    let lo = r.iter().cloned().fold(f64::MAX, f64::min);
    hi / lo - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        let f = loglog_fit(&xs, &ys).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        assert!((f.constant() - 3.0).abs() < 1e-12);
        assert!(ratio_drift(&xs, &ys, -1.5) < 1e-12);
        assert!(loglog_fit(&[1.0], &[1.0]).is_none());
    }
}
