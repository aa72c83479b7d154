//! Empirical characteristic function of `(μ, ν)` and its distance to the
//! Gaussian target `e^{-(s²+t²)/4}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mc::{map_chunks, Domain, Estimate, McConfig, Moments, SampleStream};
use crate::sums::{evaluate_sum_fixed, FrequencySet, MuNu, SumValue, Theta};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharFnPoint {
    pub s: f64,
    pub t: f64,
    pub phi: Complex64,
    /// Standard error of the complex mean, `√(Var re + Var im) / √N`.
    pub std_error: f64,
    pub gaussian: f64,
}

impl CharFnPoint {
    pub fn deviation(&self) -> f64 {
        (self.phi - self.gaussian).norm()
    }
}

pub fn gaussian_char_fn(s: f64, t: f64) -> f64 {
    (-(s * s + t * t) / 4.0).exp()
}

/// `{−2, −1, −0.5, 0, 0.5, 1, 2}²`.
pub fn default_grid() -> Vec<(f64, f64)> {
    cartesian_grid(&[-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0])
}

pub fn cartesian_grid(values: &[f64]) -> Vec<(f64, f64)> {
    values.iter().flat_map(|&s| values.iter().map(move |&t| (s, t))).collect()
}

/// Per-grid-point accumulators for `e^{i(sμ+tν)}`.
#[derive(Debug, Clone)]
pub(crate) struct PhiAcc {
    pub(crate) re: Vec<Moments>,
    pub(crate) im: Vec<Moments>,
}

impl PhiAcc {
    pub(crate) fn new(points: usize) -> Self {
        PhiAcc { re: vec![Moments::default(); points], im: vec![Moments::default(); points] }
    }

    /// Adds the average of `e^{i(sμ+tν)}` over `points` (one or an antithetic pair).
    #[inline]
    pub(crate) fn push(&mut self, grid: &[(f64, f64)], points: &[MuNu]) {
        let w = 1.0 / points.len() as f64;
        for (g, &(s, t)) in grid.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in points {
                let (sin, cos) = (s * p.mu + t * p.nu).sin_cos();
                acc += Complex64::new(cos, sin);
            }
            self.re[g].push(acc.re * w);
            self.im[g].push(acc.im * w);
        }
    }

    pub(crate) fn merge(a: &PhiAcc, b: &PhiAcc) -> PhiAcc {
        PhiAcc {
            re: a.re.iter().zip(&b.re).map(|(x, y)| Moments::merge(x, y)).collect(),
            im: a.im.iter().zip(&b.im).map(|(x, y)| Moments::merge(x, y)).collect(),
        }
    }

    pub(crate) fn finish(&self, grid: &[(f64, f64)]) -> Vec<CharFnPoint> {
        grid.iter()
            .enumerate()
            .map(|(g, &(s, t))| {
                let (re, im) = (&self.re[g], &self.im[g]);
                let count = re.count.max(1) as f64;
                CharFnPoint {
                    s,
                    t,
                    phi: Complex64::new(re.mean, im.mean),
                    std_error: ((re.variance() + im.variance()) / count).sqrt(),
                    gaussian: gaussian_char_fn(s, t),
                }
            })
            .collect()
    }
}

/// `S` at θ, and at `1 − θ` under antithetic pairing.
#[inline]
pub(crate) fn draw_sums(fs: &FrequencySet, theta: Theta, antithetic: bool, out: &mut Vec<SumValue>) {
    out.clear();
    out.push(evaluate_sum_fixed(fs, theta));
    if antithetic {
        out.push(evaluate_sum_fixed(fs, theta.reflect()));
    }
}

/// Monte Carlo `φ(s,t) = E e^{isμ+itν}` at every grid point from one sample stream.
pub fn empirical_char_fn(fs: &FrequencySet, grid: &[(f64, f64)], mc: &McConfig) -> Result<Vec<CharFnPoint>> {
    mc.validate()?;
    let parts = map_chunks(mc.draws(), mc.chunk_size, |chunk, len| {
        let mut stream = SampleStream::new(mc.seed, Domain::Theta, chunk);
        let mut acc = PhiAcc::new(grid.len());
        let mut sums = Vec::with_capacity(2);
        let mut points = Vec::with_capacity(2);
        for _ in 0..len {
            draw_sums(fs, stream.theta(), mc.antithetic, &mut sums);
            points.clear();
            points.extend(sums.iter().map(|&z| MuNu::from_sum(z, fs.len())));
            acc.push(grid, &points);
        }
        acc
    });
    let merged = crate::mc::tree_reduce(&parts, &PhiAcc::merge).unwrap_or_else(|| PhiAcc::new(grid.len()));
    Ok(merged.finish(grid))
}

/// Majorant of `|φ(s,t) − e^{-(s²+t²)/4}|` for 8-lacunary frequencies:
/// `[e^{(|s|³+|t|³)/√n} − 1] + [e^{n^{-1/4}(s²+t²)} − 1] + e^{s²+t²}/n`.
pub fn deviation_bound(s: f64, t: f64, n: u64) -> f64 {
    let n = n.max(1) as f64;
    let r2 = s * s + t * t;
    ((s.abs().powi(3) + t.abs().powi(3)) / n.sqrt()).exp_m1() + (r2 / n.powf(0.25)).exp_m1() + r2.exp() / n
}

/// Midpoint-rule estimate of `∫∫_{[−T1,T1]×[−T2,T2]} |φ̂ − e^{-(s²+t²)/4}|`
/// on a `cells × cells` grid. The error bar propagates the per-point
/// Monte Carlo errors and ignores discretization.
pub fn charfn_deviation_integral(
    fs: &FrequencySet,
    t1: f64,
    t2: f64,
    cells: usize,
    mc: &McConfig,
) -> Result<Estimate> {
    let cells = cells.max(1);
    let (hs, ht) = (2.0 * t1 / cells as f64, 2.0 * t2 / cells as f64);
    let mut grid = Vec::with_capacity(cells * cells);
    for i in 0..cells {
        for j in 0..cells {
            grid.push((-t1 + (i as f64 + 0.5) * hs, -t2 + (j as f64 + 0.5) * ht));
        }
    }
    let points = empirical_char_fn(fs, &grid, mc)?;
    let area = hs * ht;
    let value = points.iter().map(|p| p.deviation()).sum::<f64>() * area;
    let err = points.iter().map(|p| p.std_error.powi(2)).sum::<f64>().sqrt() * area;
    Ok(Estimate { value, std_error: err })
}
