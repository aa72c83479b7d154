//! Centered isotropic two-dimensional normals and the smoothing inequality.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{map_chunks, Domain, Estimate, McConfig, Moments, SampleStream};

/// `N(0, diag(σ², σ²))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub sigma2: f64,
}

impl GaussianSpec {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) || !sigma2.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma2 must be finite and >= 0, got {sigma2}")));
        }
        Ok(GaussianSpec { sigma2 })
    }
}

/// `E|Z| = √(π σ² / 2)` (Rayleigh mean).
pub fn gaussian_abs_mean(g: GaussianSpec) -> f64 {
    (PI * g.sigma2 / 2.0).sqrt()
}

/// Sample mean of `|Z|` over `mc.samples` Box–Muller draws.
pub fn simulate_gaussian_abs_mean(g: GaussianSpec, mc: &McConfig) -> Result<Estimate> {
    mc.validate()?;
    let parts = map_chunks(mc.samples, mc.chunk_size, |chunk, len| {
        let mut stream = SampleStream::new(mc.seed, Domain::Gauss, chunk);
        let mut acc = Moments::default();
        for _ in 0..len {
            let (x, y) = stream.gaussian_pair(g.sigma2);
            acc.push(x.hypot(y));
        }
        acc
    });
    Ok(Moments::merge_all(&parts).estimate())
}

/// Parameters of the two-dimensional smoothing inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingInputs {
    pub t1: f64,
    pub t2: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub x: f64,
    pub y: f64,
    /// `∫∫ |p1 − p2|` over `[−T1,T1]×[−T2,T2]`.
    pub integral_term: f64,
}

impl SmoothingInputs {
    /// Cutoffs `T1 = T2 = (ln n)^{1/4}`.
    pub fn at_log_horizon(n: f64, delta1: f64, delta2: f64, x: f64, y: f64, integral_term: f64) -> Self {
        let t = n.ln().powf(0.25);
        SmoothingInputs { t1: t, t2: t, delta1, delta2, x, y, integral_term }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.t1, self.t2, self.delta1, self.delta2, self.x, self.y];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter("T, delta, x and y must be positive".into()));
        }
        if !(self.integral_term >= 0.0) {
            return Err(Error::InvalidParameter("integral_term must be >= 0".into()));
        }
        Ok(())
    }
}

/// `x·y·I + x·y·(δ2/δ1·e^{−T1²δ1²/2} + δ1/δ2·e^{−T2²δ2²/2})`: a bound on
/// `|P1*(R) − P2*(R)|` for the rectangle `R = [−x,x]×[−y,y]`.
pub fn smoothing_bound(inp: &SmoothingInputs) -> Result<f64> {
    inp.validate()?;
    let xy = inp.x * inp.y;
    let tails = inp.delta2 / inp.delta1 * (-(inp.t1 * inp.delta1).powi(2) / 2.0).exp()
        + inp.delta1 / inp.delta2 * (-(inp.t2 * inp.delta2).powi(2) / 2.0).exp();
    Ok(xy * inp.integral_term + xy * tails)
}
