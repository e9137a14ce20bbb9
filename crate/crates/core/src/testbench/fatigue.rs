use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `T = a exp(b n)` fitted by least squares on `ln T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub a: f64,
    pub b: f64,
    /// RMS residual of `ln T`.
    pub rms_residual: f64,
}

impl ExponentialFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.a * (self.b * n).exp()
    }
}

pub fn fit_exponential(series: &[(f64, f64)]) -> Result<ExponentialFit> {
    if series.len() < 10 {
        return Err(Error::InvalidSeries(format!(
            "need at least 10 points, got {}",
            series.len()
        )));
    }
    for &(n, t) in series {
        if !n.is_finite() {
            return Err(Error::InvalidSeries(format!("non-finite cycle index {n}")));
        }
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidSeries(format!("response time {t} must be positive")));
        }
    }
    let m = series.len() as f64;
    let mean_n = series.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = series.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(n, t) in series {
        let dx = n - mean_n;
        sxx += dx * dx;
        sxy += dx * (t.ln() - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidSeries("all cycle indices are equal".into()));
    }
    let b = sxy / sxx;
    let ln_a = mean_y - b * mean_n;
    let ss: f64 = series
        .iter()
        .map(|&(n, t)| (t.ln() - ln_a - b * n).powi(2))
        .sum();
    Ok(ExponentialFit {
        a: ln_a.exp(),
        b,
        rms_residual: (ss / m).sqrt(),
    })
}
