use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fedce_learn::EvalSet;

/// Per-client symmetric noise rates for the benchmark: client `k` of `n`
/// gets rate `k/n`, the linear spacing used throughout the label-noise
/// experiments (n=2 -> [0, 0.5]; n=4 -> [0, 0.25, 0.5, 0.75]).
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePlan {
    pub num_clients: usize,
    pub rates: Vec<f64>,
}

impl NoisePlan {
    pub fn linear(num_clients: usize) -> Self {
        assert!(num_clients >= 1);
        let rates = (0..num_clients)
            .map(|k| k as f64 / num_clients as f64)
            .collect();
        NoisePlan { num_clients, rates }
    }
}

/// Symmetric label noise: exactly `round(rate * len)` samples, chosen
/// uniformly, have their label replaced by a uniform draw over the *other*
/// `num_classes - 1` labels. Features are untouched.
pub fn inject_noise(data: &EvalSet, rate: f64, num_classes: usize, seed: u64) -> EvalSet {
    assert!((0.0..=1.0).contains(&rate), "rate outside [0,1]");
    assert!(num_classes >= 2, "need at least two classes to flip");
    let mut out = data.clone();
    let flips = (rate * data.len() as f64).round() as usize;
    if flips == 0 {
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..data.len()).collect();
    indices.shuffle(&mut rng);
    for &i in indices.iter().take(flips) {
        let original = data.labels()[i];
        // Uniform over the other labels: skip past the original.
        let draw = rng.random_range(0..num_classes - 1);
        let new_label = if draw >= original { draw + 1 } else { draw };
        out.set_label(i, new_label);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn labeled_set(labels: Vec<usize>) -> EvalSet {
        let features = Array2::zeros((labels.len(), 1));
        EvalSet::new(features, labels).unwrap()
    }

    #[test]
    fn linear_plan_matches_benchmark_sequences() {
        assert_eq!(NoisePlan::linear(2).rates, vec![0.0, 0.5]);
        assert_eq!(NoisePlan::linear(4).rates, vec![0.0, 0.25, 0.5, 0.75]);
        let plan10 = NoisePlan::linear(10);
        for (k, &r) in plan10.rates.iter().enumerate() {
            assert!((r - k as f64 / 10.0).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_rate_is_identity() {
        let data = labeled_set((0..50).map(|i| i % 10).collect());
        let noisy = inject_noise(&data, 0.0, 10, 3);
        assert_eq!(noisy.labels(), data.labels());
    }

    #[test]
    fn full_rate_flips_every_label() {
        let data = labeled_set((0..200).map(|i| i % 10).collect());
        let noisy = inject_noise(&data, 1.0, 10, 3);
        for (a, b) in data.labels().iter().zip(noisy.labels()) {
            assert_ne!(a, b);
        }
    }

    #[test]
    fn flip_count_is_exact_and_features_untouched() {
        let data = labeled_set((0..1000).map(|i| i % 10).collect());
        let noisy = inject_noise(&data, 0.37, 10, 8);
        let changed = data
            .labels()
            .iter()
            .zip(noisy.labels())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(changed, 370);
        assert_eq!(data.features(), noisy.features());
    }

    #[test]
    fn replacement_labels_roughly_uniform() {
        // 10k samples of label 0 flipped at rate 0.5 over 10 classes: the
        // 5000 new labels land uniformly on 1..=9. A chi-squared statistic
        // over 8 degrees of freedom stays below the p=0.01 critical value
        // (20.09) for a healthy generator.
        let data = labeled_set(vec![0; 10_000]);
        let noisy = inject_noise(&data, 0.5, 10, 5);
        let mut counts = [0usize; 10];
        let mut flipped = 0usize;
        for (&a, &b) in data.labels().iter().zip(noisy.labels()) {
            if a != b {
                counts[b] += 1;
                flipped += 1;
            }
        }
        assert_eq!(flipped, 5000);
        assert_eq!(counts[0], 0);
        let expected = flipped as f64 / 9.0;
        let chi2: f64 = counts[1..]
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 20.09, "chi-squared {chi2}");
    }

    #[test]
    fn deterministic_per_seed() {
        let data = labeled_set((0..100).map(|i| i % 4).collect());
        let a = inject_noise(&data, 0.3, 4, 77);
        let b = inject_noise(&data, 0.3, 4, 77);
        assert_eq!(a.labels(), b.labels());
    }
}
