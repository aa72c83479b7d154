//! Reproducible Monte Carlo plumbing.
//!
//! Work is split into fixed chunks of `chunk_size` draws. Chunk `c` draws
//! from a ChaCha8 stream keyed by `(seed, domain, c)`, so the sample a lane
//! sees never depends on which worker ran it. Per-chunk accumulators are
//! collected in chunk order and merged with a fixed pairwise tree, which
//! makes every estimate bit-identical across thread counts.

use std::f64::consts::TAU;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sums::Theta;

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub chunk_size: u64,
    /// Pair every draw θ with 1 - θ and treat the pair mean as one observation.
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { samples: 1_000_000, seed: 0, chunk_size: DEFAULT_CHUNK_SIZE, antithetic: false }
    }
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be >= 1".into()));
        }
        if self.chunk_size == 0 {
            return Err(Error::InvalidParameter("chunk_size must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of independent draws; with antithetic pairing each draw
    /// accounts for two evaluations.
    pub fn draws(&self) -> u64 {
        if self.antithetic {
            self.samples.div_ceil(2)
        } else {
            self.samples
        }
    }

    /// Evaluations actually performed.
    pub fn evaluations(&self) -> u64 {
        if self.antithetic {
            2 * self.draws()
        } else {
            self.samples
        }
    }
}

/// Key domains keep independent random quantities on disjoint streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Theta = 0,
    GaussZ = 1,
    GaussY = 2,
    Gauss = 3,
}

/// Counter-based stream for one `(seed, domain, chunk)` triple.
pub struct SampleStream {
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(seed: u64, domain: Domain, chunk: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((domain as u64) << 56) | chunk);
        SampleStream { rng }
    }

    /// Uniform 63-bit dyadic rational in `[0,1)`.
    #[inline]
    pub fn theta(&mut self) -> Theta {
        Theta(self.rng.next_u64() & !1)
    }

    /// Uniform in `(0, 1]`.
    #[inline]
    pub fn uniform_open_low(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Box–Muller pair with variance `sigma2` per coordinate.
    #[inline]
    pub fn gaussian_pair(&mut self, sigma2: f64) -> (f64, f64) {
        let u1 = self.uniform_open_low();
        let u2 = self.uniform_open_low();
        let r = (-2.0 * u1.ln() * sigma2).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        (r * c, r * s)
    }
}

/// Runs `f(chunk_index, chunk_len)` for every chunk covering `draws`
/// and returns the results in chunk order.
pub fn map_chunks<R, F>(draws: u64, chunk_size: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64, u64) -> R + Sync + Send,
{
    let chunks = draws.div_ceil(chunk_size);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = chunk_size.min(draws - c * chunk_size);
            f(c, len)
        })
        .collect()
}

/// Deterministic balanced-tree reduction in slice order.
pub fn tree_reduce<T: Clone>(items: &[T], merge: &impl Fn(&T, &T) -> T) -> Option<T> {
    match items.len() {
        0 => None,
        1 => Some(items[0].clone()),
        len => {
            let (a, b) = items.split_at(len / 2);
            let left = tree_reduce(a, merge)?;
            let right = tree_reduce(b, merge)?;
            Some(merge(&left, &right))
        }
    }
}

/// Running count, mean and sum of squared deviations (Welford / Chan).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(a: &Moments, b: &Moments) -> Moments {
        if a.count == 0 {
            return *b;
        }
        if b.count == 0 {
            return *a;
        }
        let count = a.count + b.count;
        let (na, nb, n) = (a.count as f64, b.count as f64, count as f64);
        let delta = b.mean - a.mean;
        Moments {
            count,
            mean: a.mean + delta * (nb / n),
            m2: a.m2 + b.m2 + delta * delta * (na * nb / n),
        }
    }

    pub fn merge_all(parts: &[Moments]) -> Moments {
        tree_reduce(parts, &Moments::merge).unwrap_or_default()
    }

    /// Unbiased sample variance; zero below two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    pub fn estimate(&self) -> Estimate {
        Estimate { value: self.mean, std_error: self.std_error() }
    }
}

/// A scalar with a 1-sigma error bar (zero for deterministic values).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, std_error: 0.0 }
    }
}

/// `sqrt(Σ σ_i²)` for independent-looking error bars.
pub fn combined_std_error(errors: &[f64]) -> f64 {
    errors.iter().map(|e| e * e).sum::<f64>().sqrt()
}

/// Mean of `f(θ)` over uniform θ under the chunking contract.
pub fn mc_mean<F>(cfg: &McConfig, f: F) -> Result<Moments>
where
    F: Fn(Theta) -> f64 + Sync + Send,
{
    cfg.validate()?;
    let parts = map_chunks(cfg.draws(), cfg.chunk_size, |chunk, len| {
        let mut stream = SampleStream::new(cfg.seed, Domain::Theta, chunk);
        let mut acc = Moments::default();
        for _ in 0..len {
            let theta = stream.theta();
            let x = if cfg.antithetic { 0.5 * (f(theta) + f(theta.reflect())) } else { f(theta) };
            acc.push(x);
        }
        acc
    });
    Ok(Moments::merge_all(&parts))
}
