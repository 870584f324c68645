use crate::error::{BemError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in `ln` units.
    pub residual: f64,
}

/// Least-squares fit of `ln(value) = intercept + slope · ln(k)`.
pub fn fit_loglog_slope(ks: &[f64], values: &[f64]) -> Result<SlopeFit> {
    if ks.len() != values.len() {
        return Err(BemError::Dimension {
            expected: ks.len(),
            got: values.len(),
        });
    }
    if ks.len() < 3 {
        return Err(BemError::InvalidArgument(format!(
            "slope fit needs at least 3 points, got {}",
            ks.len()
        )));
    }
    if let Some(bad) = ks
        .iter()
        .chain(values)
        .find(|v| !(**v > 0.0) || !v.is_finite())
    {
        return Err(BemError::InvalidArgument(format!(
            "slope fit needs positive finite data, got {bad}"
        )));
    }
    let x: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let y: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|xi| (xi - mx) * (xi - mx)).sum();
    if sxx == 0.0 {
        return Err(BemError::InvalidArgument(
            "slope fit needs at least two distinct wavenumbers".into(),
        ));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (ss / m).sqrt(),
    })
}
