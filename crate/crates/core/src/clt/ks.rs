//! One-sample Kolmogorov–Smirnov distance against a centered normal.

use statrs::function::erf::erfc;

/// CDF of `N(0, var)`.
pub fn normal_cdf(x: f64, var: f64) -> f64 {
    0.5 * erfc(-x / (2.0 * var).sqrt())
}

/// `sup_x |F_N(x) − F(x)|` for sorted `samples`, evaluated exactly at the
/// jumps of the empirical CDF.
pub fn ks_distance_sorted<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i as f64 + 1.0) / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    })
}

/// Sorts in place, then measures the distance to `N(0, var)`.
pub fn ks_distance_normal(samples: &mut [f64], var: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.sort_unstable_by(f64::total_cmp);
    ks_distance_sorted(samples, |x| normal_cdf(x, var))
}
