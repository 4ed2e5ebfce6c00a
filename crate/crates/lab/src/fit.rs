use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

/// Magnitudes at or below this count as exactly zero.
pub const EXACT_FLOOR: f64 = 1e-12;

/// v ≈ coeff · k^{−exponent}, fitted on log-log axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub coeff: f64,
    pub exponent: f64,
    /// RMS of the log residuals.
    pub residual: f64,
    /// Points dropped for being non-positive.
    pub excluded: usize,
    /// Every |value| ≤ EXACT_FLOOR; coeff and exponent are then 0.
    pub exact: bool,
}

impl PowerFit {
    pub fn predict(&self, k: f64) -> f64 {
        self.coeff * k.powf(-self.exponent)
    }

    /// Decay at least `p`; an exact series qualifies.
    pub fn decays_at_least(&self, p: f64) -> bool {
        self.exact || self.exponent >= p
    }
}

pub fn fit_power_law(points: &[(f64, f64)]) -> LabResult<PowerFit> {
    if !points.is_empty() && points.iter().all(|(_, v)| v.abs() <= EXACT_FLOOR) {
        return Ok(PowerFit {
            coeff: 0.0,
            exponent: 0.0,
            residual: 0.0,
            excluded: 0,
            exact: true,
        });
    }
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|(k, v)| *k > 0.0 && *v > 0.0 && v.is_finite())
        .map(|(k, v)| (k.ln(), v.ln()))
        .collect();
    let excluded = points.len() - kept.len();
    if kept.len() < 3 {
        return Err(LabError::Fit(format!(
            "need at least 3 positive values, have {} ({} excluded)",
            kept.len(),
            excluded
        )));
    }
    let n = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / n;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(LabError::Fit("all k equal".into()));
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (kept
        .iter()
        .map(|p| (p.1 - icpt - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerFit {
        coeff: icpt.exp(),
        exponent: -slope,
        residual,
        excluded,
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_series() {
        let pts: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0].iter().map(|&k| (k, 5.0 / k)).collect();
        let f = fit_power_law(&pts).unwrap();
        assert!((f.exponent - 1.0).abs() < 1e-6);
        assert!((f.coeff - 5.0).abs() < 1e-9);
        assert!(f.residual < 1e-12);
        let c: Vec<(f64, f64)> = [2.0, 3.0, 9.0].iter().map(|&k| (k, 0.7)).collect();
        assert!(fit_power_law(&c).unwrap().exponent.abs() < 1e-12);
    }

    #[test]
    fn exclusions_and_exact() {
        let pts = [(1.0, 1.0), (2.0, -0.5), (4.0, 0.25), (8.0, 0.125)];
        let f = fit_power_law(&pts).unwrap();
        assert_eq!(f.excluded, 1);
        assert!((f.exponent - 1.0).abs() < 1e-12);
        assert!(fit_power_law(&pts[..3]).is_err());
        let z = fit_power_law(&[(1.0, 0.0), (2.0, 1e-14)]).unwrap();
        assert!(z.exact && z.decays_at_least(0.9));
    }
}
