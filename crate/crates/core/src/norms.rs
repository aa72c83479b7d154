//! `L^p` norms of the exponential sum, by quadrature or Monte Carlo, and
//! the fourth-moment and tail quantities of `Σ cos 4πk_jθ`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{mc_mean, Estimate, McConfig};
use crate::quadrature::{integrate_phasors, QuadratureConfig};
use crate::sums::{evaluate_sum_fixed, FrequencySet, Theta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "quad", alias = "quadrature")]
    Quadrature,
    #[serde(rename = "mc", alias = "monte-carlo")]
    MonteCarlo,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Quadrature => "quad",
            Method::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub p: u32,
    /// The norm itself, not its p-th power.
    pub value: f64,
    /// `value / √n`.
    pub normalized: f64,
    /// `None` for quadrature.
    pub std_error: Option<f64>,
    pub method: Method,
    pub n: usize,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

fn check_p(p: u32) -> Result<()> {
    match p {
        1 | 2 | 4 => Ok(()),
        _ => Err(Error::InvalidParameter(format!("p must be 1, 2 or 4, got {p}"))),
    }
}

/// `|S|`, exact for singletons where `|S| ≡ 1`.
#[inline]
pub(crate) fn modulus(sum: Complex64, n: usize) -> f64 {
    if n == 1 {
        1.0
    } else {
        sum.norm()
    }
}

/// `∫₀¹ |S(θ)|^p dθ` by composite Gauss–Legendre.
pub fn lp_power_quadrature(fs: &FrequencySet, p: u32, cfg: &QuadratureConfig) -> Result<f64> {
    check_p(p)?;
    let n = fs.len();
    if n == 1 {
        cfg.panels(fs)?;
        return Ok(1.0);
    }
    integrate_phasors(fs, cfg, |z| {
        let s: Complex64 = z.iter().sum();
        match p {
            1 => modulus(s, n),
            2 => s.norm_sqr(),
            _ => s.norm_sqr() * s.norm_sqr(),
        }
    })
}

pub fn lp_norm_quadrature(fs: &FrequencySet, p: u32, cfg: &QuadratureConfig) -> Result<NormEstimate> {
    let power = lp_power_quadrature(fs, p, cfg)?;
    let value = match p {
        1 => power,
        2 => power.sqrt(),
        _ => power.sqrt().sqrt(),
    };
    let n = fs.len();
    Ok(NormEstimate {
        p,
        value,
        normalized: value / (n as f64).sqrt(),
        std_error: None,
        method: Method::Quadrature,
        n,
        seed: None,
        samples: None,
    })
}

/// Monte Carlo estimate of `∫₀¹ |S|`.
pub fn l1_monte_carlo(fs: &FrequencySet, cfg: &McConfig) -> Result<NormEstimate> {
    let n = fs.len();
    let m = mc_mean(cfg, |theta| modulus(evaluate_sum_fixed(fs, theta), n))?;
    let scale = (n as f64).sqrt();
    Ok(NormEstimate {
        p: 1,
        value: m.mean,
        normalized: m.mean / scale,
        std_error: Some(m.std_error()),
        method: Method::MonteCarlo,
        n,
        seed: Some(cfg.seed),
        samples: Some(cfg.evaluations()),
    })
}

pub const MAX_AUTO_SAMPLES: u64 = 10_000_000_000;
const PILOT_SAMPLES: u64 = 10_000;

/// Quadrature when the default panel budget allows it, otherwise Monte Carlo
/// sized so that `std_error ≤ tol / 3`.
pub fn l1_auto(fs: &FrequencySet, tol: f64, seed: u64) -> Result<NormEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let quad = QuadratureConfig::default();
    if quad.fits(fs) {
        return lp_norm_quadrature(fs, 1, &quad);
    }
    let pilot = l1_monte_carlo(fs, &McConfig::new(PILOT_SAMPLES, seed))?;
    let sd = pilot.std_error.unwrap_or(0.0) * (PILOT_SAMPLES as f64).sqrt();
    let required = (3.0 * sd / tol).powi(2).ceil();
    if required > MAX_AUTO_SAMPLES as f64 {
        return Err(Error::BudgetExceeded { required, limit: MAX_AUTO_SAMPLES });
    }
    let samples = (required as u64).max(PILOT_SAMPLES);
    l1_monte_carlo(fs, &McConfig::new(samples, seed))
}

/// How to compute an average over θ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentMethod {
    Quadrature(QuadratureConfig),
    MonteCarlo(McConfig),
}

impl MomentMethod {
    /// Default quadrature if it fits, else `fallback` Monte Carlo.
    pub fn auto(fs: &FrequencySet, fallback: McConfig) -> Self {
        let quad = QuadratureConfig::default();
        if quad.fits(fs) {
            MomentMethod::Quadrature(quad)
        } else {
            MomentMethod::MonteCarlo(fallback)
        }
    }
}

#[inline]
fn cos_double_sum(fs: &FrequencySet, theta: Theta) -> f64 {
    fs.freqs().iter().map(|&k| (TAU * theta.phase(k.wrapping_mul(2))).cos()).sum()
}

/// `∫₀¹ (Σ_j cos 4πk_jθ)^4 dθ`.
pub fn fourth_moment_cos(fs: &FrequencySet, method: &MomentMethod) -> Result<Estimate> {
    match method {
        MomentMethod::Quadrature(cfg) => {
            let v = integrate_phasors(fs, cfg, |z| {
                let c: f64 = z.iter().map(|z| z.re * z.re - z.im * z.im).sum();
                let c2 = c * c;
                c2 * c2
            })?;
            Ok(Estimate::exact(v))
        }
        MomentMethod::MonteCarlo(mc) => {
            let m = mc_mean(mc, |theta| cos_double_sum(fs, theta).powi(4))?;
            Ok(m.estimate())
        }
    }
}

/// Fraction of θ with `|Σ_j cos 4πk_jθ| ≥ n^{3/4}`; ties count as exceeding.
pub fn markov_tail_fraction(fs: &FrequencySet, mc: &McConfig) -> Result<Estimate> {
    let threshold = (fs.len() as f64).powf(0.75);
    let m = mc_mean(mc, |theta| if cos_double_sum(fs, theta).abs() >= threshold { 1.0 } else { 0.0 })?;
    Ok(m.estimate())
}
