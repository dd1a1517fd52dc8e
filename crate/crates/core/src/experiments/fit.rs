use serde::Serialize;

use crate::{Error, Result};

/// Least-squares line through (ln x, ln y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; absent with only two points.
    pub stderr: Option<f64>,
    /// Points that entered the fit.
    pub used: usize,
}

/// Ordinary least squares on (ln x, ln y). Points with x ≤ 0 or y ≤ 0 are
/// dropped with a warning.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| {
            let ok = x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite();
            if !ok {
                log::warn!("log-log fit drops point ({x:e}, {y:e})");
            }
            ok
        })
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len();
    if n < 2 {
        return Err(Error::InsufficientPoints(n));
    }
    let nf = n as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::param("points", "all x values coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = (n > 2).then(|| {
        let ssr: f64 = logs
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    });
    Ok(SlopeFit {
        slope,
        intercept,
        stderr,
        used: n,
    })
}
