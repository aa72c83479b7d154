//! Additive energy `K = #{(a,b,c,d) : k_a + k_b = k_c + k_d}` (ordered, with
//! repeats), the Hölder lower bound `‖S‖₁ ≥ n^{3/2}/√K` it certifies, and the
//! greedy Sidon sequence.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sums::FrequencySet;

pub const MAX_ENERGY_N: usize = 1_000_000;
/// Above this size the hash map gives way to sorting the sum multiset.
const HASH_LIMIT: usize = 100_000;
pub const MAX_SIDON_N: usize = 10_000;

/// Number of ordered quadruples solving `k_a + k_b = k_c + k_d`.
///
/// Equals `∫₀¹ |S|⁴` exactly. Sums are kept in 128 bits.
pub fn count_quadruple_solutions(fs: &FrequencySet) -> Result<u128> {
    let n = fs.len();
    if n > MAX_ENERGY_N {
        return Err(Error::CapacityExceeded { n, limit: MAX_ENERGY_N });
    }
    let k = fs.freqs();
    let energy = if n <= HASH_LIMIT { energy_by_hash(k) } else { energy_by_sort(k) };
    Ok(energy)
}

// r(s) = #ordered pairs with sum s = 2·#{i<j} + #{i=j}; K = Σ r(s)²

fn energy_by_hash(k: &[u64]) -> u128 {
    let n = k.len();
    let mut reps: HashMap<u128, u64> = HashMap::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        *reps.entry(2 * k[i] as u128).or_default() += 1;
        for j in (i + 1)..n {
            *reps.entry(k[i] as u128 + k[j] as u128).or_default() += 2;
        }
    }
    reps.values().map(|&r| (r as u128) * (r as u128)).sum()
}

fn energy_by_sort(k: &[u64]) -> u128 {
    let n = k.len();
    let mut sums: Vec<(u128, u8)> = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        sums.push((2 * k[i] as u128, 1));
        for j in (i + 1)..n {
            sums.push((k[i] as u128 + k[j] as u128, 2));
        }
    }
    sums.par_sort_unstable_by_key(|s| s.0);
    sums.chunk_by(|a, b| a.0 == b.0)
        .map(|run| {
            let r: u128 = run.iter().map(|s| s.1 as u128).sum();
            r * r
        })
        .sum()
}

/// Smallest possible energy of an `n`-element set.
pub fn minimal_energy(n: usize) -> u128 {
    let n = n as u128;
    2 * n * n - n
}

pub fn is_sidon(fs: &FrequencySet) -> Result<bool> {
    Ok(count_quadruple_solutions(fs)? == minimal_energy(fs.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyCertificate {
    pub n: usize,
    pub energy: u128,
    /// `n^{3/2} / √K`
    pub l1_lower_bound: f64,
    /// `n / √K`
    pub normalized_lower_bound: f64,
    pub is_sidon: bool,
}

/// `‖S‖₂² ≤ ‖S‖₁^{2/3} ‖S‖₄^{4/3}` with `‖S‖₂² = n` and `‖S‖₄⁴ = K`.
pub fn holder_lower_bound(fs: &FrequencySet) -> Result<EnergyCertificate> {
    let n = fs.len();
    let energy = count_quadruple_solutions(fs)?;
    let root_k = (energy as f64).sqrt();
    let nf = n as f64;
    Ok(EnergyCertificate {
        n,
        energy,
        l1_lower_bound: nf * nf.sqrt() / root_k,
        normalized_lower_bound: nf / root_k,
        is_sidon: energy == minimal_energy(n),
    })
}

/// First `n` terms of the Mian–Chowla sequence: start at 1 and repeatedly
/// take the least integer keeping all pairwise sums `a_i + a_j` (`i ≤ j`)
/// distinct.
pub fn mian_chowla(n: usize) -> Result<FrequencySet> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if n > MAX_SIDON_N {
        return Err(Error::CapacityExceeded { n, limit: MAX_SIDON_N });
    }
    let mut terms: Vec<u64> = vec![1];
    let mut sums: HashSet<u64> = HashSet::from([2]);
    let mut fresh = Vec::new();
    let mut candidate = 1u64;
    while terms.len() < n {
        candidate += 1;
        fresh.clear();
        fresh.extend(terms.iter().map(|&a| a + candidate));
        fresh.push(2 * candidate);
        // new sums are pairwise distinct already; only clashes with old ones matter
        if fresh.iter().all(|s| !sums.contains(s)) {
            sums.extend(fresh.iter().copied());
            terms.push(candidate);
        }
    }
    FrequencySet::from_vec(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sums::make_frequency_set;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn set(v: &[u64]) -> FrequencySet {
        make_frequency_set(v.iter().copied()).unwrap()
    }

    fn brute_force_energy(fs: &FrequencySet) -> u128 {
        let k = fs.freqs();
        let mut count = 0u128;
        for &a in k {
            for &b in k {
                for &c in k {
                    for &d in k {
                        if a as u128 + b as u128 == c as u128 + d as u128 {
                            count += 1;
                        }
                    }
                }
            }
        }
        count
    }

    /// Greedy Sidon construction checked by brute-force energy at every step.
    fn brute_force_greedy(n: usize) -> Vec<u64> {
        let mut terms = vec![1u64];
        let mut c = 1;
        while terms.len() < n {
            c += 1;
            let mut trial = terms.clone();
            trial.push(c);
            let fs = FrequencySet::from_vec(trial.clone()).unwrap();
            if brute_force_energy(&fs) == minimal_energy(trial.len()) {
                terms = trial;
            }
        }
        terms
    }

    #[test]
    fn energy_examples() {
        assert_eq!(count_quadruple_solutions(&set(&[7])).unwrap(), 1);
        assert_eq!(count_quadruple_solutions(&set(&[1, 2, 5])).unwrap(), 15);
        assert_eq!(count_quadruple_solutions(&set(&[1, 2, 3])).unwrap(), 19);
        assert_eq!(brute_force_energy(&set(&[1, 2, 5])), 15);
        assert_eq!(brute_force_energy(&set(&[1, 2, 3])), 19);
    }

    #[test]
    fn huge_frequencies_do_not_overflow() {
        let fs = set(&[u64::MAX, u64::MAX - 1, u64::MAX - 3]);
        assert_eq!(count_quadruple_solutions(&fs).unwrap(), brute_force_energy(&fs));
    }

    #[test]
    fn sidon_examples() {
        assert!(is_sidon(&set(&[1, 2, 5])).unwrap());
        assert!(!is_sidon(&set(&[1, 2, 3])).unwrap());
        assert!(is_sidon(&set(&[4])).unwrap());
    }

    #[test]
    fn greedy_sequence_prefix() {
        assert_eq!(mian_chowla(1).unwrap().freqs(), &[1]);
        let expected = brute_force_greedy(8);
        assert_eq!(mian_chowla(8).unwrap().freqs(), expected.as_slice());
        assert_eq!(mian_chowla(5).unwrap().freqs(), &[1, 2, 4, 8, 13]);
        let ten = mian_chowla(10).unwrap();
        assert_eq!(count_quadruple_solutions(&ten).unwrap(), 190);
    }

    #[test]
    fn certificates() {
        let c = holder_lower_bound(&set(&[7])).unwrap();
        assert_eq!(c.normalized_lower_bound, 1.0);
        let c = holder_lower_bound(&set(&[1, 2, 5])).unwrap();
        assert_relative_eq!(c.normalized_lower_bound, 3.0 / 15f64.sqrt(), epsilon = 1e-15);
        assert!(c.is_sidon);
        let c = holder_lower_bound(&mian_chowla(50).unwrap()).unwrap();
        assert_eq!(c.energy, 4950);
        assert_relative_eq!(c.normalized_lower_bound, 50.0 / 4950f64.sqrt(), epsilon = 1e-15);
        assert!((c.normalized_lower_bound - 0.5f64.sqrt()).abs() < 0.004);
    }

    #[test]
    fn sidon_bounds_decrease_along_prefixes() {
        let full = mian_chowla(60).unwrap();
        let mut last = f64::INFINITY;
        for n in 1..=60 {
            let prefix = FrequencySet::from_vec(full.freqs()[..n].to_vec()).unwrap();
            let c = holder_lower_bound(&prefix).unwrap();
            assert!(c.is_sidon);
            assert!(c.normalized_lower_bound < last);
            assert!(c.normalized_lower_bound > 0.5f64.sqrt());
            last = c.normalized_lower_bound;
        }
    }

    #[test]
    fn capacity_guards() {
        assert!(matches!(mian_chowla(MAX_SIDON_N + 1), Err(Error::CapacityExceeded { .. })));
        assert!(mian_chowla(0).is_err());
    }

    proptest! {
        #[test]
        fn hash_count_matches_brute_force(v in prop::collection::btree_set(1u64..200, 1..10)) {
            let fs = FrequencySet::from_vec(v.into_iter().collect()).unwrap();
            let k = count_quadruple_solutions(&fs).unwrap();
            prop_assert_eq!(k, brute_force_energy(&fs));
            prop_assert_eq!(energy_by_sort(fs.freqs()), k);
            prop_assert!(k >= minimal_energy(fs.len()));
            prop_assert_eq!(is_sidon(&fs).unwrap(), k == minimal_energy(fs.len()));
            prop_assert!(holder_lower_bound(&fs).unwrap().normalized_lower_bound <= 1.0);
        }

        #[test]
        fn energy_is_shift_and_dilation_invariant(
            v in prop::collection::btree_set(1u64..500, 1..12),
            shift in 0i128..1000,
            c in 1u64..50,
        ) {
            let fs = FrequencySet::from_vec(v.into_iter().collect()).unwrap();
            let k = count_quadruple_solutions(&fs).unwrap();
            prop_assert_eq!(count_quadruple_solutions(&fs.shifted(shift).unwrap()).unwrap(), k);
            prop_assert_eq!(count_quadruple_solutions(&fs.dilated(c).unwrap()).unwrap(), k);
        }
    }
}
