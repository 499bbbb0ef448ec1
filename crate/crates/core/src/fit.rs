//! Least-squares convergence-order fits on log-log axes.

use crate::error::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Half-width multiplier for the per-point 95% intervals.
const Z95: f64 = 1.959_963_984_540_054;

/// Slack added above the upper end of the slope interval when checking a
/// predicted order; absorbs the arbitrary `ε` in the rate and pre-asymptotic
/// bias at desk-scale resolutions.
pub const SLOPE_BAND_SLACK: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    Ok,
    /// Every estimate is exactly zero (e.g. the scheme is exact).
    DegenerateZero,
    /// Some estimate is zero, negative or non-finite; no fit was attempted.
    NonPositive,
}

impl FitStatus {
    pub fn label(self) -> &'static str {
        match self {
            FitStatus::Ok => "ok",
            FitStatus::DegenerateZero => "degenerate-zero",
            FitStatus::NonPositive => "degenerate-nonpositive",
        }
    }
}

/// `log e = intercept - slope * log n`, i.e. `e ≈ C n^{-slope}` with
/// `C = exp(intercept)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Monte Carlo standard error of the slope, propagated from the per-point
    /// standard errors through the least-squares weights.
    pub slope_std_error: f64,
    /// 95% interval for each ladder point.
    pub per_point_ci: Vec<(f64, f64)>,
    pub status: FitStatus,
}

impl OrderFit {
    pub fn is_degenerate(&self) -> bool {
        self.status != FitStatus::Ok
    }

    /// `predicted ∈ [slope - 3σ, slope + 3σ + SLOPE_BAND_SLACK]`.
    pub fn contains_prediction(&self, predicted: f64) -> bool {
        !self.is_degenerate()
            && predicted >= self.slope - 3.0 * self.slope_std_error
            && predicted <= self.slope + 3.0 * self.slope_std_error + SLOPE_BAND_SLACK
    }
}

/// Fit `estimates[i] ≈ C ns[i]^{-slope}` by ordinary least squares in
/// `(log(1/n), log e)`. Needs at least three distinct resolutions.
///
/// `std_errors` may be empty (treated as zero).
pub fn fit_power_law(ns: &[usize], estimates: &[f64], std_errors: &[f64]) -> Result<OrderFit> {
    if ns.len() != estimates.len() || !(std_errors.is_empty() || std_errors.len() == ns.len()) {
        return Err(Error::Argument(format!(
            "ladder lengths disagree: {} resolutions, {} estimates, {} errors",
            ns.len(),
            estimates.len(),
            std_errors.len()
        )));
    }
    if ns.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 ladder points, got {}",
            ns.len()
        )));
    }
    if ns.contains(&0) {
        return Err(Error::Fit("resolution 0 in ladder".into()));
    }
    let se = |i: usize| std_errors.get(i).copied().unwrap_or(0.0);
    let per_point_ci: Vec<(f64, f64)> = estimates
        .iter()
        .enumerate()
        .map(|(i, e)| ((e - Z95 * se(i)).max(0.0), e + Z95 * se(i)))
        .collect();

    let degenerate = |status| OrderFit {
        slope: 0.0,
        intercept: 0.0,
        r_squared: 0.0,
        slope_std_error: 0.0,
        per_point_ci: per_point_ci.clone(),
        status,
    };
    if estimates.iter().all(|e| *e == 0.0) {
        return Ok(degenerate(FitStatus::DegenerateZero));
    }
    if estimates.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Ok(degenerate(FitStatus::NonPositive));
    }

    let m = ns.len() as f64;
    let xs: Vec<f64> = ns.iter().map(|n| -libm::log(*n as f64)).collect();
    let ys: Vec<f64> = estimates.iter().map(|e| libm::log(*e)).collect();
    let x_mean = xs.iter().sum::<f64>() / m;
    let y_mean = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("ladder resolutions are not distinct".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_tot: f64 = ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let slope_var: f64 = xs
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let w = (x - x_mean) / sxx;
            let rel = se(i) / estimates[i];
            w * w * rel * rel
        })
        .sum();
    Ok(OrderFit {
        slope,
        intercept,
        r_squared,
        slope_std_error: libm::sqrt(slope_var),
        per_point_ci,
        status: FitStatus::Ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn exact_power_law() {
        let ns = [16usize, 32, 64, 128];
        let e: Vec<f64> = ns
            .iter()
            .map(|n| 3.0 * libm::pow(*n as f64, -0.75))
            .collect();
        let fit = fit_power_law(&ns, &e, &[]).unwrap();
        assert!((fit.slope - 0.75).abs() < 1e-12);
        assert!((fit.intercept - libm::log(3.0)).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_n_has_unit_slope() {
        let ns = [4usize, 8, 16, 32, 64];
        let e: Vec<f64> = ns.iter().map(|n| 1.0 / *n as f64).collect();
        let fit = fit_power_law(&ns, &e, &[]).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_errors_have_zero_slope() {
        let fit = fit_power_law(&[16, 32, 64], &[0.2, 0.2, 0.2], &[]).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn three_point_hand_fit() {
        // equally spaced abscissae: slope = log(e1/e3) / (2 log 2)
        let fit = fit_power_law(&[16, 32, 64], &[0.1, 0.052, 0.026], &[]).unwrap();
        let hand = libm::log(0.1 / 0.026) / (2.0 * libm::log(2.0));
        assert!((fit.slope - hand).abs() < 1e-12);
        assert!((fit.slope - 0.972).abs() < 5e-4);
    }

    #[test]
    fn degenerate_flags() {
        let z = fit_power_law(&[4, 8, 16], &[0.0; 3], &[]).unwrap();
        assert_eq!(z.status, FitStatus::DegenerateZero);
        assert!(z.slope.is_finite());
        let np = fit_power_law(&[4, 8, 16], &[0.1, 0.0, 0.01], &[]).unwrap();
        assert_eq!(np.status, FitStatus::NonPositive);
        assert!(!np.contains_prediction(0.0));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            fit_power_law(&[4], &[0.1], &[]),
            Err(Error::Fit(_))
        ));
        assert!(matches!(
            fit_power_law(&[4, 8], &[0.1], &[]),
            Err(Error::Argument(_))
        ));
        assert!(matches!(
            fit_power_law(&[4, 4, 4], &[0.1, 0.2, 0.3], &[]),
            Err(Error::Fit(_))
        ));
    }

    #[test]
    fn slope_uncertainty_and_band() {
        let ns = [16usize, 32, 64];
        let e = vec![0.1, 0.05, 0.025];
        let se = vec![0.01, 0.005, 0.0025];
        let fit = fit_power_law(&ns, &e, &se).unwrap();
        // w = ±1/(2 ln 2) at the ends, 0 in the middle; rel = 0.1
        let expected = libm::sqrt(2.0) * 0.1 / (2.0 * libm::log(2.0));
        assert!((fit.slope_std_error - expected).abs() < 1e-12);
        assert!(fit.contains_prediction(1.0));
        assert!(fit.contains_prediction(1.1));
        assert!(!fit.contains_prediction(0.5));
        assert!(fit
            .per_point_ci
            .iter()
            .zip(&e)
            .all(|((lo, hi), v)| lo < v && v < hi));
    }
}
