//! Lower bounds on `Σ_n` by searching over frequency sets, and the
//! convergence study of `q`-lacunary sets toward `√π/2`.
//!
//! The normalized L1 norm is invariant under `k ↦ k + m` and `k ↦ c·k`, so
//! the search only visits canonical sets: smallest element 1 and the
//! differences to it coprime.

use std::collections::HashMap;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clt::limit_value;
use crate::error::{Error, Result};
use crate::mc::McConfig;
use crate::norms::{l1_monte_carlo, lp_norm_quadrature};
use crate::quadrature::QuadratureConfig;
use crate::sums::{lacunary_set, FrequencySet};

pub const MAX_EXHAUSTIVE_CANDIDATES: u128 = 2_000_000;
const COARSE_POINTS_PER_PERIOD: u64 = 8;
const REFINE_TOP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    Exhaustive,
    Anneal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub n: usize,
    pub best_set: FrequencySet,
    /// Normalized L1 norm of `best_set`.
    pub best_value: f64,
    pub method: SearchMethod,
    pub evaluations: u64,
    pub seed: Option<u64>,
    /// Change in `best_value` when the quadrature density is doubled.
    pub value_error: f64,
}

/// Shift to start at 1, then divide the differences by their gcd.
pub fn canonicalize(fs: &FrequencySet) -> FrequencySet {
    let base = fs.k_min();
    let g = fs.freqs().iter().fold(0u64, |g, &k| g.gcd(&(k - base)));
    let g = g.max(1);
    let freqs = fs.freqs().iter().map(|&k| 1 + (k - base) / g).collect();
    FrequencySet::from_vec(freqs).expect("canonical form of a valid set is valid")
}

pub fn is_canonical(fs: &FrequencySet) -> bool {
    canonicalize(fs) == *fs
}

fn coarse(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig { points_per_period: COARSE_POINTS_PER_PERIOD.min(cfg.points_per_period), ..*cfg }
}

fn normalized_l1(fs: &FrequencySet, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(lp_norm_quadrature(fs, 1, cfg)?.normalized)
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    acc
}

/// All canonical `n`-sets with entries `≤ max_freq`, in lexicographic order.
pub fn canonical_sets(n: usize, max_freq: u64) -> Result<Vec<FrequencySet>> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if (max_freq as u128) < n as u128 {
        return Err(Error::InvalidParameter(format!("no {n}-element sets below {max_freq}")));
    }
    let size = binomial(max_freq - 1, n as u64 - 1);
    if size > MAX_EXHAUSTIVE_CANDIDATES {
        return Err(Error::SearchSpaceTooLarge { size, limit: MAX_EXHAUSTIVE_CANDIDATES });
    }
    let mut out = Vec::new();
    let mut current = vec![1u64];
    extend_combinations(&mut current, n, max_freq, 0, &mut out);
    Ok(out)
}

fn extend_combinations(current: &mut Vec<u64>, n: usize, max_freq: u64, g: u64, out: &mut Vec<FrequencySet>) {
    if current.len() == n {
        if g <= 1 {
            out.push(FrequencySet::from_vec(current.clone()).expect("increasing by construction"));
        }
        return;
    }
    let remaining = (n - current.len()) as u64;
    let start = current[current.len() - 1] + 1;
    for k in start..=(max_freq + 1 - remaining) {
        current.push(k);
        extend_combinations(current, n, max_freq, g.gcd(&(k - 1)), out);
        current.pop();
    }
}

/// Picks the best of `candidates` (already scored coarsely): the top ten by
/// coarse score are re-measured with `cfg`, ties go to the smaller set.
fn refine(
    mut scored: Vec<(FrequencySet, f64)>,
    cfg: &QuadratureConfig,
) -> Result<(FrequencySet, f64, f64)> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.freqs().cmp(b.0.freqs())));
    scored.truncate(REFINE_TOP);
    let fine: Vec<(FrequencySet, f64)> = scored
        .into_iter()
        .map(|(fs, _)| normalized_l1(&fs, cfg).map(|v| (fs, v)))
        .collect::<Result<_>>()?;
    let (best_set, best_value) = fine
        .into_iter()
        .reduce(|best, cand| {
            let better = cand.1 > best.1 || (cand.1 == best.1 && cand.0.freqs() < best.0.freqs());
            if better {
                cand
            } else {
                best
            }
        })
        .expect("at least one candidate");
    let doubled = QuadratureConfig {
        points_per_period: cfg.points_per_period * 2,
        max_total_points: cfg.max_total_points.saturating_mul(2),
    };
    let check = normalized_l1(&best_set, &doubled)?;
    Ok((best_set, best_value, (check - best_value).abs()))
}

/// Maximizes the normalized L1 norm over every canonical `n`-set with
/// entries `≤ max_freq`.
pub fn exhaustive_sigma(n: usize, max_freq: u64, cfg: &QuadratureConfig) -> Result<SearchResult> {
    let sets = canonical_sets(n, max_freq)?;
    let coarse_cfg = coarse(cfg);
    let scored: Vec<(FrequencySet, f64)> = sets
        .into_par_iter()
        .map(|fs| normalized_l1(&fs, &coarse_cfg).map(|v| (fs, v)))
        .collect::<Result<_>>()?;
    let evaluations = scored.len() as u64;
    let (best_set, best_value, value_error) = refine(scored, cfg)?;
    Ok(SearchResult {
        n,
        best_set,
        best_value,
        method: SearchMethod::Exhaustive,
        evaluations,
        seed: None,
        value_error,
    })
}

fn random_canonical(rng: &mut ChaCha8Rng, n: usize, max_freq: u64) -> FrequencySet {
    let mut picked = vec![1u64];
    while picked.len() < n {
        let k = rng.random_range(2..=max_freq);
        if !picked.contains(&k) {
            picked.push(k);
        }
    }
    canonicalize(&FrequencySet::from_vec(picked).expect("distinct positive"))
}

/// Simulated annealing over canonical sets with entries `≤ max_freq`.
///
/// A move replaces one non-leading frequency by a fresh value and
/// re-canonicalizes. Acceptance is `exp(Δ/T)` under geometric cooling from
/// the spread of 100 random sets down to a thousandth of it.
pub fn anneal_sigma(n: usize, max_freq: u64, budget: u64, seed: u64) -> Result<SearchResult> {
    anneal_sigma_with(n, max_freq, budget, seed, &QuadratureConfig::default())
}

pub fn anneal_sigma_with(
    n: usize,
    max_freq: u64,
    budget: u64,
    seed: u64,
    cfg: &QuadratureConfig,
) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be >= 1".into()));
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    if (max_freq as u128) < n as u128 {
        return Err(Error::InvalidParameter(format!("no {n}-element sets below {max_freq}")));
    }
    let coarse_cfg = coarse(cfg);
    let mut cache: HashMap<FrequencySet, f64> = HashMap::new();
    let score = |fs: &FrequencySet, cache: &mut HashMap<FrequencySet, f64>| -> Result<f64> {
        if let Some(&v) = cache.get(fs) {
            return Ok(v);
        }
        let v = normalized_l1(fs, &coarse_cfg)?;
        cache.insert(fs.clone(), v);
        Ok(v)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n >= 2 && max_freq > n as u64 {
        let mut probe = Vec::with_capacity(100);
        for _ in 0..100 {
            let fs = random_canonical(&mut rng, n, max_freq);
            probe.push(score(&fs, &mut cache)?);
        }
        let mean = probe.iter().sum::<f64>() / probe.len() as f64;
        let spread = (probe.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / probe.len() as f64).sqrt();
        let t0 = if spread > 0.0 { spread } else { 1e-3 };
        let cooling = (1e-3f64).powf(1.0 / budget as f64);

        let mut current = random_canonical(&mut rng, n, max_freq);
        let mut current_value = score(&current, &mut cache)?;
        let mut temperature = t0;
        for _ in 0..budget {
            let mut freqs = current.freqs().to_vec();
            let idx = rng.random_range(1..n);
            let fresh = loop {
                let k = rng.random_range(2..=max_freq);
                if !freqs.contains(&k) {
                    break k;
                }
            };
            freqs[idx] = fresh;
            let candidate = canonicalize(&FrequencySet::from_vec(freqs).expect("distinct positive"));
            let value = score(&candidate, &mut cache)?;
            let delta = value - current_value;
            if delta >= 0.0 || rng.random::<f64>() < (delta / temperature).exp() {
                current = candidate;
                current_value = value;
            }
            temperature *= cooling;
        }
    } else {
        // a single canonical set exists
        let fs = canonical_sets(n, n as u64)?.remove(0);
        score(&fs, &mut cache)?;
    }

    let evaluations = cache.len() as u64;
    let scored: Vec<(FrequencySet, f64)> = cache.into_iter().collect();
    let (best_set, best_value, value_error) = refine(scored, cfg)?;
    Ok(SearchResult {
        n,
        best_set,
        best_value,
        method: SearchMethod::Anneal,
        evaluations,
        seed: Some(seed),
        value_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub n: u32,
    pub normalized_l1: f64,
    pub std_error: f64,
    /// `√π/2 − normalized_l1`
    pub gap_to_limit: f64,
}

/// Normalized L1 of `{q, …, q^n}` for each `n`, by Monte Carlo.
pub fn convergence_study(q: u64, n_list: &[u32], mc: &McConfig) -> Result<Vec<StudyRow>> {
    let limit = limit_value();
    n_list
        .iter()
        .map(|&n| {
            let fs = lacunary_set(q, n)?;
            let e = l1_monte_carlo(&fs, mc)?;
            Ok(StudyRow {
                n,
                normalized_l1: e.normalized,
                std_error: e.std_error.unwrap_or(0.0) / (fs.len() as f64).sqrt(),
                gap_to_limit: limit - e.normalized,
            })
        })
        .collect()
}

/// Least-squares fit of `gap ≈ c₂·(ln n)^{-1/16}`; diagnostic only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub c2: f64,
    pub rms_residual: f64,
    pub points: usize,
}

pub fn fit_rate(rows: &[StudyRow]) -> Option<RateFit> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.n >= 2).map(|r| ((r.n as f64).ln().powf(-1.0 / 16.0), r.gap_to_limit)).collect();
    if pts.is_empty() {
        return None;
    }
    let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
    let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
    let c2 = sxy / sxx;
    let rms = (pts.iter().map(|(x, y)| (y - c2 * x).powi(2)).sum::<f64>() / pts.len() as f64).sqrt();
    Some(RateFit { c2, rms_residual: rms, points: pts.len() })
}

/// `Σ` read two ways: the literal supremum over the computed `n`, and the
/// value at the largest `n` as the large-`n` trend.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaSummary {
    pub sup_over_n: f64,
    pub sup_at_n: u32,
    pub large_n_trend: f64,
    pub large_n: u32,
    pub limit: f64,
}

pub fn summarize_study(rows: &[StudyRow]) -> Option<SigmaSummary> {
    let sup = rows.iter().max_by(|a, b| a.normalized_l1.total_cmp(&b.normalized_l1))?;
    let last = rows.iter().max_by_key(|r| r.n)?;
    Some(SigmaSummary {
        sup_over_n: sup.normalized_l1,
        sup_at_n: sup.n,
        large_n_trend: last.normalized_l1,
        large_n: last.n,
        limit: limit_value(),
    })
}

/// `1 − c·ln n / n`, a reference curve shape with caller-supplied `c`.
pub fn bourgain_reference(n: u32, c: f64) -> f64 {
    let n = n as f64;
    1.0 - c * n.ln() / n
}
