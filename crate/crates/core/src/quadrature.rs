//! Composite 8-point Gauss–Legendre quadrature over one period.
//!
//! `[0,1]` is cut into `points_per_period · k_max` equal panels. Node phases
//! are formed as `(k·i mod P)/P + k·u/P` with the first part in exact
//! integer arithmetic, so accuracy does not degrade with `k`. Integrands see
//! the unit phasors `e^{2πi k_j θ}` of every frequency at the node.

use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::mc::tree_reduce;
use crate::sums::FrequencySet;

/// Positive Gauss–Legendre nodes on `[-1, 1]` for order 8, with weights.
const GL8: [(f64, f64); 4] = [
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

/// Nodes mapped to `(0,1)` and weights scaled to sum to 1.
fn unit_rule() -> [(f64, f64); 8] {
    let mut out = [(0.0, 0.0); 8];
    for (i, &(x, w)) in GL8.iter().enumerate() {
        out[3 - i] = ((1.0 - x) / 2.0, w / 2.0);
        out[4 + i] = ((1.0 + x) / 2.0, w / 2.0);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Panels per period of the highest frequency.
    pub points_per_period: u64,
    /// Upper bound on the number of panels.
    pub max_total_points: u64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { points_per_period: 32, max_total_points: 1 << 26 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.points_per_period < 8 {
            return Err(Error::InvalidParameter(format!(
                "points_per_period must be >= 8, got {}",
                self.points_per_period
            )));
        }
        Ok(())
    }

    /// Panel count for `fs`, or `FrequencyTooLarge` when over budget.
    pub fn panels(&self, fs: &FrequencySet) -> Result<u64> {
        self.validate()?;
        let required = self.points_per_period as u128 * fs.k_max() as u128;
        if required > self.max_total_points as u128 {
            return Err(Error::FrequencyTooLarge { required, budget: self.max_total_points });
        }
        Ok(required as u64)
    }

    pub fn fits(&self, fs: &FrequencySet) -> bool {
        self.panels(fs).is_ok()
    }
}

const PANELS_PER_BLOCK: u64 = 4096;

/// `∫₀¹ f(e^{2πi k_1 θ}, …, e^{2πi k_n θ}) dθ`.
pub fn integrate_phasors<T, F>(fs: &FrequencySet, cfg: &QuadratureConfig, f: F) -> Result<T>
where
    T: Copy + Send + Sync + Zero + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(&[Complex64]) -> T + Sync + Send,
{
    let panels = cfg.panels(fs)?;
    let rule = unit_rule();
    let n = fs.len();
    let p = panels as f64;

    // e^{2πi k u_m / P}: the within-panel rotation of each frequency.
    let rotations: Vec<[Complex64; 8]> = fs
        .freqs()
        .iter()
        .map(|&k| {
            let mut r = [Complex64::zero(); 8];
            for (slot, &(u, _)) in r.iter_mut().zip(rule.iter()) {
                let (s, c) = (TAU * (k as f64 / p) * u).sin_cos();
                *slot = Complex64::new(c, s);
            }
            r
        })
        .collect();
    let residues: Vec<u64> = fs.freqs().iter().map(|&k| k % panels).collect();

    let blocks = panels.div_ceil(PANELS_PER_BLOCK);
    let partials: Vec<T> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * PANELS_PER_BLOCK;
            let end = (start + PANELS_PER_BLOCK).min(panels);
            let mut base = vec![Complex64::zero(); n];
            let mut z = vec![Complex64::zero(); n];
            let mut acc = T::zero();
            // k·i mod P, advanced incrementally across the block
            let mut offsets: Vec<u64> = residues
                .iter()
                .map(|&kr| ((kr as u128 * start as u128) % panels as u128) as u64)
                .collect();
            for _ in start..end {
                for ((slot, r), &kr) in base.iter_mut().zip(offsets.iter_mut()).zip(&residues) {
                    let cur = *r;
                    *r = if cur >= panels - kr { cur - (panels - kr) } else { cur + kr };
                    let r = if cur > panels / 2 { cur as f64 - p } else { cur as f64 };
                    let (s, c) = (TAU * (r / p)).sin_cos();
                    *slot = Complex64::new(c, s);
                }
                let mut panel = T::zero();
                for (m, &(_, w)) in rule.iter().enumerate() {
                    for j in 0..n {
                        z[j] = base[j] * rotations[j][m];
                    }
                    panel = panel + f(&z) * w;
                }
                acc = acc + panel;
            }
            acc
        })
        .collect();
    let total = tree_reduce(&partials, &|a: &T, b: &T| *a + *b).unwrap_or_else(T::zero);
    Ok(total * (1.0 / p))
}

/// Plain composite Gauss–Legendre on `[a, b]` with `panels` panels; used for
/// one-dimensional integrals that are not exponential sums.
pub fn integrate_interval<F>(a: f64, b: f64, panels: usize, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    let rule = unit_rule();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let left = a + i as f64 * h;
        total += rule.iter().map(|&(u, w)| w * f(left + u * h)).sum::<f64>();
    }
    total * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sums::make_frequency_set;
    use approx::assert_relative_eq;

    #[test]
    fn rule_integrates_degree_15_exactly() {
        let rule = unit_rule();
        assert_relative_eq!(rule.iter().map(|r| r.1).sum::<f64>(), 1.0, epsilon = 1e-15);
        for d in 0..16 {
            let q: f64 = rule.iter().map(|&(u, w)| w * u.powi(d)).sum();
            assert_relative_eq!(q, 1.0 / (d as f64 + 1.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn phasor_mean_vanishes_for_nonzero_frequency() {
        let fs = make_frequency_set([3u64, 17]).unwrap();
        let cfg = QuadratureConfig::default();
        let m: Complex64 = integrate_phasors(&fs, &cfg, |z| z[0] + z[1] * 2.0).unwrap();
        assert!(m.norm() < 1e-14);
        let one: f64 = integrate_phasors(&fs, &cfg, |_| 1.0).unwrap();
        assert_relative_eq!(one, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn budget_is_enforced() {
        let fs = make_frequency_set([1u64 << 30]).unwrap();
        let err = integrate_phasors(&fs, &QuadratureConfig::default(), |_| 0.0f64).unwrap_err();
        assert!(matches!(err, Error::FrequencyTooLarge { .. }));
        let cfg = QuadratureConfig { points_per_period: 4, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn interval_rule() {
        let v = integrate_interval(0.0, std::f64::consts::PI, 16, f64::sin);
        assert_relative_eq!(v, 2.0, epsilon = 1e-14);
    }
}
