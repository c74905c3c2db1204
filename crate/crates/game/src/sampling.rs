use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded stream of uniform permutations of `0..n`. The same seed always
/// produces the same stream, independent of platform.
pub struct PermutationSampler {
    rng: ChaCha8Rng,
    n: usize,
}

impl PermutationSampler {
    pub fn new(n: usize, seed: u64) -> Self {
        PermutationSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn draw(&mut self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.shuffle(&mut self.rng);
        perm
    }
}

/// Seeded stream of coalitions drawn uniformly from the nonempty proper
/// subsets of `0..n`. Requires `n >= 2` (no proper nonempty subset exists
/// otherwise).
pub struct CoalitionSampler {
    rng: ChaCha8Rng,
    n: usize,
}

impl CoalitionSampler {
    pub fn new(n: usize, seed: u64) -> Self {
        assert!(n >= 2, "proper nonempty subsets need n >= 2");
        CoalitionSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
        }
    }

    pub fn draw(&mut self) -> crate::Coalition {
        let full = (1u32 << self.n) - 1;
        let mask = self.rng.random_range(1..full);
        crate::Coalition::from_mask(self.n, mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let mut a = PermutationSampler::new(6, 42);
        let mut b = PermutationSampler::new(6, 42);
        for _ in 0..10 {
            assert_eq!(a.draw(), b.draw());
        }
    }

    #[test]
    fn permutations_are_valid() {
        let mut s = PermutationSampler::new(5, 1);
        for _ in 0..50 {
            let mut p = s.draw();
            p.sort_unstable();
            assert_eq!(p, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn coalitions_are_proper_and_nonempty() {
        let mut s = CoalitionSampler::new(4, 9);
        for _ in 0..200 {
            let c = s.draw();
            assert!(!c.is_empty());
            assert!(!c.is_grand());
        }
    }

    #[test]
    fn permutations_roughly_uniform() {
        // With n=3 there are 6 permutations; 6000 draws should put each
        // within a loose band around 1000.
        let mut s = PermutationSampler::new(3, 7);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..6000 {
            *counts.entry(s.draw()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (_, c) in counts {
            assert!(c > 800 && c < 1200, "count {c} outside band");
        }
    }
}
