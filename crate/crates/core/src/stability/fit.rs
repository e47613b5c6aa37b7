use statrs::distribution::{ContinuousCDF, StudentsT};

use super::SweepResult;
use crate::{Error, Result};

/// Least-squares line `y = slope·x + intercept` with a 95% Student-t
/// interval on the slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

/// Log-log fit of one column against another over the perturbed rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentFit {
    pub x_column: String,
    pub y_column: String,
    pub fit: LinearFit,
    /// Log-log fit of `y` against `x·max(ln(1/x), 1)`.
    pub log_profile: LinearFit,
}

/// `x·max(ln(1/x), 1)`.
pub fn log_profile(x: f64) -> f64 {
    x * (1.0 / x).ln().max(1.0)
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let (ci_low, ci_high) = if n > 2 {
        let se = (sse / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0).map(|d| d.inverse_cdf(0.975)).unwrap_or(f64::NAN);
        (slope - t * se, slope + t * se)
    } else {
        (f64::NAN, f64::NAN)
    };
    LinearFit { slope, intercept, r_squared, ci_low, ci_high, n }
}

/// Slope of `ln y` against `ln x`. Needs at least three points, all
/// positive, with distinct `x`.
pub fn fit_log_log(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::InvalidArgument(format!("fit needs at least 3 paired values, got {}", xs.len().min(ys.len()))));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::InvalidArgument(format!("log-log fit needs positive values, got {v}")));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    if lx.iter().all(|x| (x - lx[0]).abs() < 1e-14) {
        return Err(Error::InvalidArgument("fit abscissae are all equal".into()));
    }
    Ok(linear_fit(&lx, &ly))
}

/// Fits `y_column` against `x_column` over the rows with `ε > 0`; the
/// unperturbed row only carries discretization error and is left out.
pub fn fit_exponent(result: &SweepResult, x_column: &str, y_column: &str) -> Result<ExponentFit> {
    let pick = |name: &str| -> Result<Vec<f64>> {
        result
            .perturbed()
            .map(|r| r.column(name).ok_or_else(|| Error::InvalidArgument(format!("unknown column '{name}'"))))
            .collect()
    };
    let xs = pick(x_column)?;
    let ys = pick(y_column)?;
    let fit = fit_log_log(&xs, &ys)?;
    let profiled: Vec<f64> = xs.iter().map(|&x| log_profile(x)).collect();
    let log_profile = fit_log_log(&profiled, &ys)?;
    Ok(ExponentFit { x_column: x_column.to_string(), y_column: y_column.to_string(), fit, log_profile })
}
