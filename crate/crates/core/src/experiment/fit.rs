use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `y = a x^b`, fitted in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    /// Sum of squared residuals of `ln y`.
    pub residual: f64,
}

impl PowerLawFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x.powf(self.b)
    }
}

/// Ordinary least squares on `(ln x, ln y)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::param(format!("{} points; a fit needs at least 3", points.len())));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::param("power-law fit needs positive finite coordinates"));
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0) {
        return Err(Error::param("all x values coincide"));
    }
    let b = sxy / sxx;
    let ln_a = my - b * mx;
    let residual = logs.iter().map(|&(lx, ly)| (ly - ln_a - b * lx).powi(2)).sum();
    Ok(PowerLawFit { a: ln_a.exp(), b, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub x: u64,
    pub y: u64,
}

/// `ceil(a x^b)` at even `x` from 2 to `x_max`.
pub fn bound_curve(a: f64, b: f64, x_max: u64) -> Vec<BoundPoint> {
    (1..=x_max / 2)
        .map(|h| {
            let x = 2 * h;
            BoundPoint { x, y: (a * (x as f64).powf(b)).ceil() as u64 }
        })
        .collect()
}
