use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Least-squares line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Power-law fit `y ∝ x^order` on a ladder of measurements.
///
/// When every `y` is at or below the floor the ladder has converged exactly:
/// `exact_convergence` is set and `fitted_order`/`r_squared` are NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub fitted_order: f64,
    pub r_squared: f64,
    pub exact_convergence: bool,
}

impl ScalingReport {
    pub fn order_within(&self, lo: f64, hi: f64) -> bool {
        !self.exact_convergence && self.fitted_order >= lo && self.fitted_order <= hi
    }
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("a line needs at least two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Log–log slope of `ys` against `xs`, with an exact-convergence flag for
/// all-zero ladders.
pub fn fit_order(xs: &[f64], ys: &[f64]) -> Result<ScalingReport> {
    fit_order_with_floor(xs, ys, 0.0)
}

/// As [`fit_order`], treating values `≤ floor` as zero.
pub fn fit_order_with_floor(xs: &[f64], ys: &[f64], floor: f64) -> Result<ScalingReport> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "an order fit needs at least 3 points, got {}",
            xs.len()
        )));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) || xs[0] <= 0.0 {
        return Err(Error::InvalidArgument("abscissae must be positive and strictly increasing".into()));
    }
    if ys.iter().any(|y| *y < 0.0 || !y.is_finite()) {
        return Err(Error::InvalidArgument("measurements must be finite and non-negative".into()));
    }
    let report = |fitted_order, r_squared, exact_convergence| ScalingReport {
        xs: xs.to_vec(),
        ys: ys.to_vec(),
        fitted_order,
        r_squared,
        exact_convergence,
    };
    if ys.iter().all(|&y| y <= floor) {
        return Ok(report(f64::NAN, f64::NAN, true));
    }
    if ys.iter().any(|&y| y <= floor) {
        return Err(Error::InvalidArgument(
            "ladder mixes converged and non-converged points; no power law applies".into(),
        ));
    }
    let lx: Vec<f64> = xs.iter().map(|x| libm::log(*x)).collect();
    let ly: Vec<f64> = ys.iter().map(|y| libm::log(*y)).collect();
    let fit = linear_fit(&lx, &ly)?;
    Ok(report(fit.slope, fit.r_squared, false))
}
