use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `(ln n, ln d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
}

impl RateFit {
    pub fn predict(&self, n: f64) -> f64 {
        (self.intercept + self.slope * n.ln()).exp()
    }
}

/// Fits `d ~ e^intercept n^slope`. Points with a nonpositive coordinate are
/// ignored; fewer than 3 remaining points is an error.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, d)| *n > 0.0 && *d > 0.0 && n.is_finite() && d.is_finite())
        .map(|(n, d)| (n.ln(), d.ln()))
        .collect();
    if logs.len() < 3 {
        return Err(Error::DegenerateFit(logs.len()));
    }
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit(1));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(RateFit { slope, intercept, residual })
}

/// `max / min` of positive values; infinite if any value is not positive.
pub fn spread(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    if values.is_empty() || !(lo > 0.0) {
        f64::INFINITY
    } else {
        hi / lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let pts: Vec<_> = [16.0, 64.0, 256.0, 1024.0].iter().map(|n| (*n, 5.0 / n)).collect();
        let f = fit_rate(&pts).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert!((f.predict(100.0) - 0.05).abs() < 1e-12);

        let pts: Vec<_> = [4.0, 9.0, 100.0].iter().map(|n: &f64| (*n, 3.0 / n.sqrt())).collect();
        assert!((fit_rate(&pts).unwrap().slope + 0.5).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 0.5)]), Err(Error::DegenerateFit(2))));
        assert!(matches!(
            fit_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, -1.0), (4.0, 0.2)]),
            Err(Error::DegenerateFit(2))
        ));
        assert!(fit_rate(&[(2.0, 1.0), (2.0, 0.5), (2.0, 0.2)]).is_err());
    }

    #[test]
    fn spread_of_values() {
        assert_eq!(spread(&[2.0, 1.0, 4.0]), 4.0);
        assert_eq!(spread(&[1.0, 0.0]), f64::INFINITY);
    }
}
