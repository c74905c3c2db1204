use crate::{caps, Coalition, Game, GameError, PayoffVector, PermutationSampler};

/// Exact Shapley value by full subset enumeration; `2^n` utility
/// evaluations, guarded by [`caps::EXACT_ENUMERATION`].
pub fn shapley_exact(game: &Game) -> Result<PayoffVector, GameError> {
    shapley_exact_with_cap(game, caps::EXACT_ENUMERATION)
}

pub fn shapley_exact_with_cap(game: &Game, cap: usize) -> Result<PayoffVector, GameError> {
    let n = game.n();
    if n > cap {
        return Err(GameError::PlayerCountExceeded { n, cap });
    }

    // Evaluate every subset once, in mask order.
    let total = 1usize << n;
    let mut values = vec![0.0; total];
    for (mask, slot) in values.iter_mut().enumerate() {
        *slot = game.v(Coalition::from_mask(n, mask as u32));
    }

    // The classical weight |S|!(n-|S|-1)!/n! equals 1/(n * C(n-1, |S|)).
    let weights: Vec<f64> = (0..n)
        .map(|s| 1.0 / (n as f64 * binomial(n - 1, s)))
        .collect();

    let mut phi = vec![0.0; n];
    for mask in 0..total {
        let size = (mask as u32).count_ones() as usize;
        for (i, phi_i) in phi.iter_mut().enumerate() {
            if mask & (1 << i) != 0 {
                continue;
            }
            let marginal = values[mask | (1 << i)] - values[mask];
            *phi_i += weights[size] * marginal;
        }
    }
    Ok(PayoffVector::new(phi))
}

/// Monte Carlo Shapley estimate: the running mean of per-permutation
/// marginal contributions. Deterministic for a given sampler seed.
///
/// When `early_stop` is set, iteration halts once the running-mean vector
/// moves by less than the threshold (L-infinity) in one step, checked from
/// the second iteration onward.
pub fn shapley_monte_carlo(
    game: &Game,
    sampler: &mut PermutationSampler,
    iterations: usize,
    early_stop: Option<f64>,
) -> PayoffVector {
    assert!(iterations >= 1, "at least one iteration required");
    assert_eq!(
        sampler.n(),
        game.n(),
        "sampler is over a different player set"
    );
    let n = game.n();
    let mut sums = vec![0.0; n];
    let mut prev_means = vec![0.0; n];

    for it in 1..=iterations {
        let perm = sampler.draw();
        let mut prefix = Coalition::empty(n);
        let mut prev_v = 0.0; // v(empty) after normalization
        for &player in &perm {
            prefix = prefix.with(player);
            let v = game.v(prefix);
            sums[player] += v - prev_v;
            prev_v = v;
        }
        if let Some(threshold) = early_stop {
            let mut delta: f64 = 0.0;
            for i in 0..n {
                let mean = sums[i] / it as f64;
                delta = delta.max((mean - prev_means[i]).abs());
                prev_means[i] = mean;
            }
            if it >= 2 && delta < threshold {
                return PayoffVector::new(prev_means);
            }
        }
    }
    let means = sums.iter().map(|s| s / iterations as f64).collect();
    PayoffVector::new(means)
}

fn binomial(n: usize, k: usize) -> f64 {
    // Exact in f64 for n <= 24.
    let k = k.min(n - k.min(n));
    let mut result = 1.0;
    for i in 0..k {
        result = result * (n - i) as f64 / (i + 1) as f64;
    }
    result
}
