//! The factorization `e^{isμ+itν} = α(s,t)·exp(−(s²+t²)/4 + β(s,t))` and the
//! product moments behind `E[α] = 1`.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::remainder::w_remainder;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_phasors, QuadratureConfig};
use crate::sums::{FrequencySet, Theta};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `e^{2πi k_j θ}` for every frequency.
pub fn phasors(fs: &FrequencySet, theta: Theta) -> Vec<Complex64> {
    fs.freqs()
        .iter()
        .map(|&k| {
            let (s, c) = (TAU * theta.phase(k)).sin_cos();
            Complex64::new(c, s)
        })
        .collect()
}

/// `Π_j (1 + is·sin_j/√n)(1 + it·cos_j/√n)` from phasors `z_j = cos_j + i·sin_j`.
#[inline]
pub fn alpha_from_phasors(z: &[Complex64], s: f64, t: f64) -> Complex64 {
    let scale = (z.len() as f64).sqrt();
    let (a, b) = (s / scale, t / scale);
    z.iter().fold(Complex64::new(1.0, 0.0), |acc, z| {
        acc * Complex64::new(1.0, a * z.im) * Complex64::new(1.0, b * z.re)
    })
}

/// `Σ_j [(s²−t²)cos 4πk_jθ/(4n) + w(s·sin_j/√n) + w(t·cos_j/√n)]`.
pub fn beta_from_phasors(z: &[Complex64], s: f64, t: f64) -> Result<Complex64> {
    let n = z.len() as f64;
    let scale = n.sqrt();
    let mut acc = Complex64::new(0.0, 0.0);
    for z in z {
        let cos_double = z.re * z.re - z.im * z.im;
        acc += (s * s - t * t) * cos_double / (4.0 * n);
        acc += w_remainder(s * z.im / scale)?;
        acc += w_remainder(t * z.re / scale)?;
    }
    Ok(acc)
}

/// `exp((s²+t²)/4 + Σ_j (t²−s²)cos 4πk_jθ/(4n))`, a pointwise majorant of `|α|`.
pub fn alpha_modulus_bound_from_phasors(z: &[Complex64], s: f64, t: f64) -> f64 {
    let n = z.len() as f64;
    let tail: f64 = z.iter().map(|z| (t * t - s * s) * (z.re * z.re - z.im * z.im) / (4.0 * n)).sum();
    ((s * s + t * t) / 4.0 + tail).exp()
}

pub fn alpha_at(fs: &FrequencySet, s: f64, t: f64, theta: Theta) -> Complex64 {
    alpha_from_phasors(&phasors(fs, theta), s, t)
}

/// Fails when some `|s·sin_j|/√n` or `|t·cos_j|/√n` reaches 1.
pub fn beta_at(fs: &FrequencySet, s: f64, t: f64, theta: Theta) -> Result<Complex64> {
    beta_from_phasors(&phasors(fs, theta), s, t)
}

pub fn alpha_modulus_bound_at(fs: &FrequencySet, s: f64, t: f64, theta: Theta) -> f64 {
    alpha_modulus_bound_from_phasors(&phasors(fs, theta), s, t)
}

/// `E[Π_j (is·sin 2πk_jθ)^{δ_j} (it·cos 2πk_jθ)^{δ̂_j}]` by quadrature.
pub fn product_moment(
    fs: &FrequencySet,
    delta: &[bool],
    delta_hat: &[bool],
    s: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if delta.len() != fs.len() || delta_hat.len() != fs.len() {
        return Err(Error::InvalidParameter(format!(
            "selector lengths {} and {} do not match n = {}",
            delta.len(),
            delta_hat.len(),
            fs.len()
        )));
    }
    integrate_phasors(fs, cfg, |z| {
        let mut acc = Complex64::new(1.0, 0.0);
        for ((z, &d), &dh) in z.iter().zip(delta).zip(delta_hat) {
            if d {
                acc *= I * (s * z.im);
            }
            if dh {
                acc *= I * (t * z.re);
            }
        }
        acc
    })
}

/// `E[α(s,t)]` by quadrature; `α(0,0) ≡ 1` is returned without integrating.
pub fn alpha_mean(fs: &FrequencySet, s: f64, t: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    if s == 0.0 && t == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    integrate_phasors(fs, cfg, |z| alpha_from_phasors(z, s, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sums::{evaluate_sum_fixed, lacunary_set, make_frequency_set, MuNu};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_moment_examples() {
        let fs = make_frequency_set([8u64, 64]).unwrap();
        let cfg = QuadratureConfig::default();
        let m = product_moment(&fs, &[false, false], &[false, false], 0.7, -1.3, &cfg).unwrap();
        assert!((m - 1.0).norm() < 1e-13);
        let m = product_moment(&fs, &[true, false], &[false, false], 1.0, 1.0, &cfg).unwrap();
        assert!(m.norm() < 1e-13);
        let m = product_moment(&fs, &[true, true], &[false, false], 1.0, 1.0, &cfg).unwrap();
        assert!(m.norm() < 1e-13);
        assert!(product_moment(&fs, &[true], &[false, false], 1.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn product_moment_sees_resonances() {
        // sin(2π·1θ)·sin(2π·1θ) is not available (distinct k), but for {1,2}
        // cos 2πθ · cos 2πθ · cos 4πθ style terms are: E[sin_1 sin_1]... use
        // E[(i cos_1)(i cos_2)·...]; simplest resonance: {1,2,3}, sin_1 sin_2 sin_3.
        let fs = make_frequency_set([1u64, 2, 3]).unwrap();
        let cfg = QuadratureConfig::default();
        // E[sin a sin b sin(a+b)]... with cos: E[cos θ1 cos θ2 cos θ3] = 1/4 for 1+2=3
        let m = product_moment(&fs, &[false; 3], &[true; 3], 1.0, 1.0, &cfg).unwrap();
        // (i)^3 · 1/4
        assert!((m - Complex64::new(0.0, -0.25)).norm() < 1e-13);
    }

    #[test]
    fn alpha_mean_examples() {
        let cfg = QuadratureConfig::default();
        let m = alpha_mean(&lacunary_set(8, 1).unwrap(), 0.5, 0.5, &cfg).unwrap();
        assert!((m - 1.0).norm() <= 1e-8);
        let m = alpha_mean(&lacunary_set(8, 4).unwrap(), 1.0, 1.0, &cfg).unwrap();
        assert!((m - 1.0).norm() <= 1e-6);
        let fs = make_frequency_set([3u64, 5]).unwrap();
        assert_eq!(alpha_mean(&fs, 0.0, 0.0, &cfg).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn alpha_mean_deviates_without_gaps() {
        let cfg = QuadratureConfig::default();
        let m = alpha_mean(&make_frequency_set([1u64, 2, 3]).unwrap(), 2.0, 2.0, &cfg).unwrap();
        assert!((m - 1.0).norm() > 1e-3, "{m}");
    }

    #[test]
    fn factorization_and_modulus_bound_pointwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8u32);
            let fs = lacunary_set(8, n).unwrap();
            let theta = Theta(rng.random::<u64>());
            let scale = (n as f64).sqrt();
            // keep the w arguments inside (-1, 1)
            let s = rng.random_range(-0.99..0.99) * scale;
            let t = rng.random_range(-0.99..0.99) * scale;
            let z = phasors(&fs, theta);
            let alpha = alpha_from_phasors(&z, s, t);
            assert!(alpha.norm() <= alpha_modulus_bound_from_phasors(&z, s, t) * (1.0 + 1e-12));
            let beta = beta_from_phasors(&z, s, t).unwrap();
            let lhs = alpha * (Complex64::new(-(s * s + t * t) / 4.0, 0.0) + beta).exp();
            let MuNu { mu, nu } = MuNu::from_sum(evaluate_sum_fixed(&fs, theta), fs.len());
            let rhs = Complex64::new(0.0, s * mu + t * nu).exp();
            assert!((lhs - rhs).norm() < 1e-10, "n={n} s={s} t={t}");
        }
    }

    #[test]
    fn beta_rejects_out_of_domain_arguments() {
        let fs = lacunary_set(8, 1).unwrap();
        assert!(beta_at(&fs, 2.0, 2.0, Theta(1 << 60)).is_err());
    }
}
