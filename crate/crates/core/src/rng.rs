//! Seeded permutation sampling with a fixed, portable algorithm.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded through
//! `SeedableRng::seed_from_u64`. Bounded integers use Lemire's
//! multiply-and-reject on `next_u64`, and permutations are produced by a
//! Fisher–Yates shuffle of the identity, swapping position `i` with a
//! uniform `j ∈ 0..=i` for `i = n-1` down to `1`. None of these steps
//! depends on the platform, so a seed fixes the whole sample sequence.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

#[derive(Debug, Clone)]
pub struct PermutationSampler {
    rng: ChaCha8Rng,
}

impl PermutationSampler {
    pub fn new(seed: u64) -> Self {
        PermutationSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform integer in `0..bound`. `bound` must be nonzero.
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = (self.rng.next_u64() as u128) * (bound as u128);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    /// Overwrites `perm` with a fresh uniform permutation of `0..perm.len()`.
    pub fn shuffle_into(&mut self, perm: &mut [usize]) {
        for (i, slot) in perm.iter_mut().enumerate() {
            *slot = i;
        }
        for i in (1..perm.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            perm.swap(i, j);
        }
    }
}

/// Advances `perm` to the next permutation in lexicographic order; returns
/// `false` (leaving `perm` sorted ascending) after the last one.
pub fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        perm.reverse();
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = PermutationSampler::new(7);
        let mut b = PermutationSampler::new(7);
        let mut pa = [0usize; 9];
        let mut pb = [0usize; 9];
        for _ in 0..50 {
            a.shuffle_into(&mut pa);
            b.shuffle_into(&mut pb);
            assert_eq!(pa, pb);
        }
    }

    #[test]
    fn shuffles_are_permutations_and_roughly_uniform() {
        let mut s = PermutationSampler::new(1);
        let mut counts = [0u32; 6];
        let mut p = [0usize; 3];
        for _ in 0..60_000 {
            s.shuffle_into(&mut p);
            let mut sorted = p;
            sorted.sort();
            assert_eq!(sorted, [0, 1, 2]);
            let idx = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
                .iter()
                .position(|q| *q == p)
                .unwrap();
            counts[idx] += 1;
        }
        // 10_000 expected per cell, sd ~ 91
        assert!(counts.iter().all(|&c| (9_500..10_500).contains(&c)), "{counts:?}");
    }

    #[test]
    fn below_stays_in_range() {
        let mut s = PermutationSampler::new(3);
        for bound in [1u64, 2, 3, 7, 1 << 40, u64::MAX] {
            for _ in 0..100 {
                assert!(s.below(bound) < bound);
            }
        }
    }

    #[test]
    fn lexicographic_permutations() {
        let mut p = [0, 1, 2, 3];
        let mut seen = Vec::new();
        loop {
            seen.push(p);
            if !next_permutation(&mut p) {
                break;
            }
        }
        assert_eq!(seen.len(), 24);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(p, [0, 1, 2, 3]);
    }
}
