use fedce_game::PayoffVector;
use fedce_learn::{evaluate, EvalSet};
use fedce_sim::{aggregate_weighted, RoundLog};

use crate::CeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LooWeighting {
    /// Plain sum of per-round LOO values.
    Unweighted,
    /// Round t counts t times.
    Linear,
}

/// Round-level leave-one-out values, `[round][client-index]` with clients in
/// ascending id order.
///
/// `loo_t(i)` is the round's post-aggregation accuracy minus the accuracy of
/// the aggregate rebuilt without client i's delta, with the remaining
/// clients' weights renormalized to `n_j / sum_{k != i} n_k`. For a single
/// client the "aggregate without" degenerates to the round's starting model.
pub fn round_loo_values(logs: &[RoundLog], test: &EvalSet) -> Result<Vec<Vec<f64>>, CeError> {
    if logs.is_empty() {
        return Err(CeError::NoRounds);
    }
    let mut per_round = Vec::with_capacity(logs.len());
    for log in logs {
        let acc_after = evaluate(&log.global_after, test)?;
        let ids: Vec<usize> = log.sizes.keys().copied().collect();
        let mut row = Vec::with_capacity(ids.len());
        for &drop_id in &ids {
            let base_acc = if ids.len() == 1 {
                evaluate(&log.global_before, test)?
            } else {
                let without = aggregate_weighted(
                    &log.global_before,
                    log.local_updates
                        .iter()
                        .filter(|(id, _)| **id != drop_id)
                        .map(|(id, delta)| (delta, log.sizes[id])),
                );
                evaluate(&without, test)?
            };
            row.push(acc_after - base_acc);
        }
        per_round.push(row);
    }
    Ok(per_round)
}

/// Sum of per-round LOO values, optionally weighted linearly by round index.
pub fn round_loo(
    logs: &[RoundLog],
    test: &EvalSet,
    weighting: LooWeighting,
) -> Result<PayoffVector, CeError> {
    let values = round_loo_values(logs, test)?;
    let n = values[0].len();
    let mut payoff = vec![0.0; n];
    for (round_idx, row) in values.iter().enumerate() {
        let w = match weighting {
            LooWeighting::Unweighted => 1.0,
            LooWeighting::Linear => (round_idx + 1) as f64,
        };
        for (i, &v) in row.iter().enumerate() {
            payoff[i] += w * v;
        }
    }
    Ok(PayoffVector::new(payoff))
}

/// Fraction of rounds where a client's LOO is strictly positive. A LOO of
/// exactly zero counts as a non-contribution.
pub fn reputation(logs: &[RoundLog], test: &EvalSet) -> Result<PayoffVector, CeError> {
    let values = round_loo_values(logs, test)?;
    Ok(reputation_from_values(&values))
}

/// The Heaviside average of [`reputation`], exposed for precomputed LOO
/// values.
pub fn reputation_from_values(per_round: &[Vec<f64>]) -> PayoffVector {
    assert!(!per_round.is_empty(), "no rounds");
    let n = per_round[0].len();
    let rounds = per_round.len() as f64;
    let mut payoff = vec![0.0; n];
    for row in per_round {
        for (i, &v) in row.iter().enumerate() {
            if v > 0.0 {
                payoff[i] += 1.0;
            }
        }
    }
    for p in &mut payoff {
        *p /= rounds;
    }
    PayoffVector::new(payoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heaviside_average_arithmetic() {
        // Signs (+, -, +, -, +) over five rounds -> 0.6; zeros count as
        // non-contributions.
        let values = vec![
            vec![0.1, 0.0],
            vec![-0.2, -0.1],
            vec![0.3, 0.0],
            vec![-0.1, 0.2],
            vec![0.05, 0.0],
        ];
        let rep = reputation_from_values(&values);
        assert!((rep.get(0) - 0.6).abs() < 1e-12);
        assert!((rep.get(1) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn all_positive_and_all_negative_saturate() {
        let values = vec![vec![0.1, -0.1], vec![0.2, -0.2]];
        let rep = reputation_from_values(&values);
        assert_eq!(rep.get(0), 1.0);
        assert_eq!(rep.get(1), 0.0);
    }

    #[test]
    fn linear_weighting_arithmetic() {
        // Constant per-round LOO c: unweighted total c*T, linear total
        // c*T(T+1)/2.
        let c = 0.01;
        let t = 5;
        let values = vec![vec![c]; t];
        let unweighted: f64 = values.iter().map(|row| row[0]).sum();
        let linear: f64 = values
            .iter()
            .enumerate()
            .map(|(idx, row)| (idx + 1) as f64 * row[0])
            .sum();
        assert!((unweighted - c * t as f64).abs() < 1e-12);
        assert!((linear - c * (t * (t + 1) / 2) as f64).abs() < 1e-12);
    }
}
