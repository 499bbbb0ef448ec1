//! Monte Carlo summaries.

use alloc::vec::Vec;

/// Number of contiguous batches used for batch-means standard errors.
pub const BATCHES: usize = 10;

/// Sample mean in index order.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Standard error of the mean from the unbiased sample variance.
pub fn std_error(values: &[f64]) -> f64 {
    let m = values.len();
    if m < 2 {
        return 0.0;
    }
    let mu = mean(values);
    let var = values.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (m - 1) as f64;
    libm::sqrt(var / m as f64)
}

/// Standard error of the mean from `batches` contiguous batch means.
pub fn batch_std_error(values: &[f64], batches: usize) -> f64 {
    let m = values.len();
    let b = batches.min(m);
    if b < 2 {
        return 0.0;
    }
    let means: Vec<f64> = (0..b)
        .map(|k| mean(&values[k * m / b..(k + 1) * m / b]))
        .collect();
    let grand = mean(&means);
    let var = means.iter().map(|v| (v - grand) * (v - grand)).sum::<f64>() / (b - 1) as f64;
    libm::sqrt(var / b as f64)
}

/// `(mean^{1/p}, se)` for samples of `|error|^p`, with the batch-means
/// standard error of the mean mapped through `x ↦ x^{1/p}` by the delta method.
pub fn lp_norm_summary(powered: &[f64], p: f64) -> (f64, f64) {
    let mu = mean(powered);
    if !(mu > 0.0) {
        return (0.0, 0.0);
    }
    let se_mu = batch_std_error(powered, BATCHES);
    let estimate = libm::pow(mu, 1.0 / p);
    (estimate, estimate / (p * mu) * se_mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn summaries() {
        assert_eq!(mean(&[1.0, 2.0, 3.0]), 2.0);
        assert!((std_error(&[1.0, 2.0, 3.0]) - libm::sqrt(1.0 / 3.0)).abs() < 1e-15);
        assert_eq!(batch_std_error(&[5.0; 40], 10), 0.0);
        assert_eq!(lp_norm_summary(&[0.0; 20], 2.0), (0.0, 0.0));
        let v: Vec<f64> = (0..20)
            .map(|i| if i % 2 == 0 { 1.0 } else { 3.0 })
            .collect();
        let (e, se) = lp_norm_summary(&v, 2.0);
        assert!((e - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(se, 0.0);
        let w = vec![1.0, 1.0, 3.0, 3.0];
        assert!(batch_std_error(&w, 2) > 0.0);
    }
}
