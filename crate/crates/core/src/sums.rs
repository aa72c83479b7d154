//! Frequency sets and pointwise evaluation of `S(θ) = Σ_j e^{2πi k_j θ}`.
//!
//! Frequencies go up to `u64::MAX`, so `k·θ` is never formed in plain
//! floating point. Two exact reduction paths exist:
//!
//! * [`Theta`] is a 64-bit fixed-point angle; `k·θ mod 1` is one wrapping
//!   integer multiply. Monte Carlo code works exclusively with it.
//! * A float `θ` is split into `m·2^-s` and reduced with 128-bit integer
//!   arithmetic, see [`reduced_phase`].
//!
//! Either way the reduced phase lies in `[-1/2, 1/2]` and is rounded once
//! before the trigonometric kernel sees it.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Value of the exponential sum at one point.
pub type SumValue = Complex64;

/// Sorted, strictly increasing, positive 64-bit frequencies. Never empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FrequencySet {
    freqs: Vec<u64>,
}

/// Validates and sorts `values` into a [`FrequencySet`].
pub fn make_frequency_set<I, T>(values: I) -> Result<FrequencySet>
where
    I: IntoIterator<Item = T>,
    T: Into<i128>,
{
    let mut freqs = Vec::new();
    for v in values {
        let v: i128 = v.into();
        if v <= 0 {
            return Err(Error::NonPositive(v));
        }
        let k = u64::try_from(v).map_err(|_| Error::OutOfRange(v))?;
        freqs.push(k);
    }
    FrequencySet::from_vec(freqs)
}

/// `{q, q², …, q^n}`.
pub fn lacunary_set(q: u64, n: u32) -> Result<FrequencySet> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("lacunary ratio must be >= 2, got {q}")));
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut freqs = Vec::with_capacity(n as usize);
    let mut k = 1u64;
    for _ in 0..n {
        k = k.checked_mul(q).ok_or(Error::Overflow { base: q, exponent: n })?;
        freqs.push(k);
    }
    Ok(FrequencySet { freqs })
}

impl FrequencySet {
    pub fn from_vec(mut freqs: Vec<u64>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(Error::Empty);
        }
        freqs.sort_unstable();
        if freqs[0] == 0 {
            return Err(Error::NonPositive(0));
        }
        if let Some(w) = freqs.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Duplicate(w[0]));
        }
        Ok(Self { freqs })
    }

    pub fn freqs(&self) -> &[u64] {
        &self.freqs
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn k_min(&self) -> u64 {
        self.freqs[0]
    }

    pub fn k_max(&self) -> u64 {
        self.freqs[self.freqs.len() - 1]
    }

    /// `{k_j + m}`; fails if any entry leaves `[1, u64::MAX]`.
    pub fn shifted(&self, m: i128) -> Result<Self> {
        make_frequency_set(self.freqs.iter().map(|&k| k as i128 + m))
    }

    /// `{c·k_j}`.
    pub fn dilated(&self, c: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::NonPositive(0));
        }
        let freqs = self
            .freqs
            .iter()
            .map(|&k| k.checked_mul(c).ok_or(Error::OutOfRange(k as i128 * c as i128)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { freqs })
    }

    /// Parses the frequency-set file format: one positive integer per line,
    /// blank lines ignored, `#` starts a comment.
    pub fn parse_file_format(text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let v: i128 = body.parse().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("not an integer: {body:?}"),
            })?;
            values.push(v);
        }
        make_frequency_set(values)
    }

    /// Renders the set in the file format accepted by [`Self::parse_file_format`].
    pub fn to_file_format(&self) -> String {
        let mut out = String::new();
        for k in &self.freqs {
            out.push_str(&k.to_string());
            out.push('\n');
        }
        out
    }
}

impl TryFrom<Vec<u64>> for FrequencySet {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::from_vec(v)
    }
}

impl From<FrequencySet> for Vec<u64> {
    fn from(fs: FrequencySet) -> Self {
        fs.freqs
    }
}

/// Comma separated list, e.g. `1,2,5`.
impl FromStr for FrequencySet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<i128>().map_err(|_| Error::Parse {
                    line: 1,
                    message: format!("not an integer: {t:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        make_frequency_set(values)
    }
}

impl fmt::Display for FrequencySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, k) in self.freqs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        f.write_str("}")
    }
}

/// A point of the circle `[0,1)` as a 64-bit fixed-point fraction
/// (`θ = bits / 2^64`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Theta(pub u64);

const TWO_POW_NEG_64: f64 = 1.0 / 18_446_744_073_709_551_616.0;

impl Theta {
    /// Rounds a float to the nearest representable fixed-point angle.
    pub fn from_f64(theta: f64) -> Self {
        let frac = theta.rem_euclid(1.0);
        let scaled = (frac * 18_446_744_073_709_551_616.0).round();
        // saturating cast maps 2^64 to u64::MAX; wrap it to 0 instead
        if scaled >= 18_446_744_073_709_551_616.0 {
            Theta(0)
        } else {
            Theta(scaled as u64)
        }
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 * TWO_POW_NEG_64
    }

    /// `1 - θ` (mod 1).
    pub fn reflect(self) -> Self {
        Theta(self.0.wrapping_neg())
    }

    /// `k·θ mod 1` mapped to `[-1/2, 1/2)`; exact up to the final rounding.
    #[inline]
    pub fn phase(self, k: u64) -> f64 {
        (k.wrapping_mul(self.0) as i64) as f64 * TWO_POW_NEG_64
    }
}

/// `k·θ mod 1` in `[-1/2, 1/2]` for any finite float `θ`.
///
/// `|θ|` is written as `m·2^-s` with a 53-bit integer `m`; for `s ≤ 117`
/// the product `k·m` fits in 128 bits and is reduced exactly, otherwise
/// `k·|θ| < 1/2` and one float product suffices.
pub fn reduced_phase(k: u64, theta: f64) -> f64 {
    if theta == 0.0 || !theta.is_finite() {
        return if theta.is_finite() { 0.0 } else { f64::NAN };
    }
    let bits = theta.abs().to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (m, e) = if biased == 0 { (frac_bits, 1 - 1075) } else { (frac_bits | (1u64 << 52), biased - 1075) };
    let s = -e;
    let phase = if s <= 0 {
        0.0
    } else if s <= 117 {
        let product = k as u128 * m as u128;
        let modulus = 1u128 << s;
        let frac = product & (modulus - 1);
        let signed = if frac >= modulus >> 1 { frac as i128 - modulus as i128 } else { frac as i128 };
        signed as f64 * 2f64.powi(-s)
    } else {
        k as f64 * theta.abs()
    };
    if theta < 0.0 {
        -phase
    } else {
        phase
    }
}

/// `S(θ)` with exact argument reduction.
pub fn evaluate_sum(fs: &FrequencySet, theta: f64) -> SumValue {
    let mut acc = Complex64::new(0.0, 0.0);
    for &k in fs.freqs() {
        let (s, c) = (TAU * reduced_phase(k, theta)).sin_cos();
        acc.re += c;
        acc.im += s;
    }
    acc
}

/// `S(θ)` at a fixed-point angle.
#[inline]
pub fn evaluate_sum_fixed(fs: &FrequencySet, theta: Theta) -> SumValue {
    let mut acc = Complex64::new(0.0, 0.0);
    for &k in fs.freqs() {
        let (s, c) = (TAU * theta.phase(k)).sin_cos();
        acc.re += c;
        acc.im += s;
    }
    acc
}

/// Writes `(sin 2πk_jθ, cos 2πk_jθ)` for every frequency into `out`.
#[inline]
pub fn sin_cos_terms(fs: &FrequencySet, theta: Theta, out: &mut [(f64, f64)]) {
    for (slot, &k) in out.iter_mut().zip(fs.freqs()) {
        *slot = (TAU * theta.phase(k)).sin_cos();
    }
}

/// Normalized sine and cosine sums at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuNu {
    pub mu: f64,
    pub nu: f64,
}

impl MuNu {
    pub fn from_sum(sum: SumValue, n: usize) -> Self {
        let scale = (n as f64).sqrt();
        MuNu { mu: sum.im / scale, nu: sum.re / scale }
    }
}

pub fn evaluate_mu_nu(fs: &FrequencySet, theta: f64) -> MuNu {
    MuNu::from_sum(evaluate_sum(fs, theta), fs.len())
}

const PAR_BATCH_MIN: usize = 4096;

/// `evaluate_sum` mapped over `thetas`; identical bit for bit.
pub fn evaluate_batch(fs: &FrequencySet, thetas: &[f64]) -> Vec<SumValue> {
    if thetas.len() < PAR_BATCH_MIN {
        thetas.iter().map(|&t| evaluate_sum(fs, t)).collect()
    } else {
        thetas.par_iter().map(|&t| evaluate_sum(fs, t)).collect()
    }
}
