use fedce_game::{least_core, shapley_exact, Coalition, Game, LeastCoreSolution, PayoffVector};
use fedce_learn::{evaluate, EvalSet};
use fedce_lp::Simplex;
use fedce_sim::RoundLog;

use crate::bank::{BankBudget, PseudoModelBank};
use crate::CeError;

/// Per-round totals below this contribute nothing to the normalized
/// aggregation (guards the division for near-zero or negative round sums).
const ROUND_SUM_TOL: f64 = 1e-9;

/// Knobs of the multi-round family.
#[derive(Debug, Clone, Copy)]
pub struct MrConfig {
    /// Time decay; round t is weighted by `lambda^(t-1)`.
    pub lambda: f64,
    /// Rounds whose decay falls below this are skipped entirely.
    pub truncation_threshold: Option<f64>,
    /// Weigh round contributions by the global model's test accuracy at
    /// that round (the truncated variant's convention).
    pub accuracy_weighting: bool,
}

impl MrConfig {
    pub fn lambda_mr(lambda: f64) -> Self {
        let cfg = MrConfig {
            lambda,
            truncation_threshold: None,
            accuracy_weighting: false,
        };
        cfg.validate();
        cfg
    }

    pub fn truncated(lambda: f64, threshold: f64) -> Self {
        let cfg = MrConfig {
            lambda,
            truncation_threshold: Some(threshold),
            accuracy_weighting: true,
        };
        cfg.validate();
        cfg
    }

    fn validate(&self) {
        assert!(
            self.lambda > 0.0 && self.lambda <= 1.0,
            "decay outside (0, 1]"
        );
        if let Some(th) = self.truncation_threshold {
            // Values above 1 are permitted and truncate every round.
            assert!(th > 0.0, "threshold must be positive");
        }
    }
}

/// Per-round contribution indices (the round-level Shapley values of the
/// pseudo-model game). Clients absent from the round would score zero; under
/// full participation every client appears.
#[derive(Debug, Clone)]
pub struct RoundContribution {
    pub t: usize,
    pub values: PayoffVector,
}

fn ensure_rounds(logs: &[RoundLog]) -> Result<(), CeError> {
    if logs.is_empty() {
        return Err(CeError::NoRounds);
    }
    Ok(())
}

/// Evaluate every pseudo-model on the test set, mask-indexed.
fn bank_utilities(bank: &PseudoModelBank, test: &EvalSet) -> Result<Vec<f64>, CeError> {
    let n = bank.n();
    let mut utilities = Vec::with_capacity(1 << n);
    for mask in 0..(1u32 << n) {
        let model = bank.model(Coalition::from_mask(n, mask));
        utilities.push(evaluate(model, test)?);
    }
    Ok(utilities)
}

/// Coalition game over evaluated utilities; construction subtracts the
/// shared-initialization accuracy (the empty coalition's entry) so the game
/// is normalized.
fn game_from(n: usize, utilities: Vec<f64>) -> Game {
    Game::new(n, move |c: Coalition| utilities[c.mask() as usize])
}

/// Advance a fresh bank through every log without per-round evaluation.
fn final_bank(logs: &[RoundLog], budget: BankBudget) -> Result<PseudoModelBank, CeError> {
    let mut bank = PseudoModelBank::for_logs(&logs[0], budget)?;
    for log in logs {
        bank.update(log)?;
    }
    Ok(bank)
}

/// Advance the bank round by round, computing the round game's exact Shapley
/// values for rounds where `active` holds. Inactive rounds are skipped
/// entirely (no bank update, no contribution entry).
fn round_contributions(
    logs: &[RoundLog],
    test: &EvalSet,
    budget: BankBudget,
    active: impl Fn(usize) -> bool,
) -> Result<Vec<RoundContribution>, CeError> {
    let mut bank = PseudoModelBank::for_logs(&logs[0], budget)?;
    let mut rounds = Vec::new();
    for log in logs {
        if !active(log.t) {
            continue;
        }
        bank.update(log)?;
        let utilities = bank_utilities(&bank, test)?;
        let game = game_from(bank.n(), utilities);
        let values = shapley_exact(&game)?;
        rounds.push(RoundContribution { t: log.t, values });
    }
    Ok(rounds)
}

/// One-Round Shapley: advance the bank through all rounds, evaluate the
/// final pseudo-models, and take the exact Shapley value of that game.
pub fn or_shapley(
    logs: &[RoundLog],
    test: &EvalSet,
    budget: BankBudget,
) -> Result<PayoffVector, CeError> {
    ensure_rounds(logs)?;
    let bank = final_bank(logs, budget)?;
    let utilities = bank_utilities(&bank, test)?;
    let game = game_from(bank.n(), utilities);
    Ok(shapley_exact(&game)?)
}

/// Least core over the final pseudo-model game. The reported payoff is the
/// first optimal vertex the deterministic pivot order reaches.
pub fn or_least_core(
    logs: &[RoundLog],
    test: &EvalSet,
    simplex: &Simplex,
    budget: BankBudget,
) -> Result<LeastCoreSolution, CeError> {
    ensure_rounds(logs)?;
    let bank = final_bank(logs, budget)?;
    let utilities = bank_utilities(&bank, test)?;
    let game = game_from(bank.n(), utilities);
    Ok(least_core(&game, simplex)?)
}

/// Federated Shapley: the per-round Shapley values of the advancing
/// pseudo-model game, summed across rounds without decay or normalization.
pub fn federated_shapley(
    logs: &[RoundLog],
    test: &EvalSet,
    budget: BankBudget,
) -> Result<(PayoffVector, Vec<RoundContribution>), CeError> {
    ensure_rounds(logs)?;
    let rounds = round_contributions(logs, test, budget, |_| true)?;
    let n = rounds[0].values.len();
    let mut totals = vec![0.0; n];
    for rc in &rounds {
        for (i, total) in totals.iter_mut().enumerate() {
            *total += rc.values.get(i);
        }
    }
    Ok((PayoffVector::new(totals), rounds))
}

/// Decay-weighted multi-round aggregation: round contributions are
/// normalized by their per-round (signed) sum and combined with weight
/// `lambda^(t-1)`. Rounds with a near-zero or negative total are dropped.
pub fn lambda_mr(
    logs: &[RoundLog],
    test: &EvalSet,
    cfg: &MrConfig,
    budget: BankBudget,
) -> Result<PayoffVector, CeError> {
    cfg.validate();
    ensure_rounds(logs)?;
    let rounds = round_contributions(logs, test, budget, |_| true)?;
    Ok(lambda_mr_from_contributions(&rounds, cfg.lambda))
}

/// The aggregation formula of [`lambda_mr`], exposed for direct use on
/// precomputed round contributions.
pub fn lambda_mr_from_contributions(rounds: &[RoundContribution], lambda: f64) -> PayoffVector {
    assert!(!rounds.is_empty(), "no round contributions");
    let n = rounds[0].values.len();
    let mut payoff = vec![0.0; n];
    for rc in rounds {
        let sum = rc.values.sum();
        if sum <= ROUND_SUM_TOL {
            continue;
        }
        let weight = lambda.powi(rc.t as i32 - 1);
        for (i, p) in payoff.iter_mut().enumerate() {
            *p += weight * rc.values.get(i) / sum;
        }
    }
    PayoffVector::new(payoff)
}

/// Truncated multi-round: rounds whose decay `lambda^(t-1)` falls below the
/// threshold are skipped before any bank update, and surviving round
/// contributions are additionally weighted by the global model's test
/// accuracy at that round. With a threshold above 1 every round is truncated
/// and the payoff is the zero vector.
pub fn truncated_mr(
    logs: &[RoundLog],
    test: &EvalSet,
    cfg: &MrConfig,
    budget: BankBudget,
) -> Result<PayoffVector, CeError> {
    cfg.validate();
    ensure_rounds(logs)?;
    let threshold = cfg
        .truncation_threshold
        .ok_or(CeError::MissingTruncationThreshold)?;
    let lambda = cfg.lambda;
    let n = logs[0].sizes.len();
    let rounds = round_contributions(logs, test, budget, |t| {
        lambda.powi(t as i32 - 1) >= threshold
    })?;
    if rounds.is_empty() {
        return Ok(PayoffVector::zeros(n));
    }
    let accs: Vec<f64> = logs.iter().map(|log| log.test_acc_after).collect();
    Ok(truncated_mr_from_contributions(
        &rounds,
        lambda,
        cfg.accuracy_weighting,
        &accs,
    ))
}

/// The aggregation formula of [`truncated_mr`]: `accs` holds the per-round
/// global test accuracies indexed by `t - 1`.
pub fn truncated_mr_from_contributions(
    rounds: &[RoundContribution],
    lambda: f64,
    accuracy_weighting: bool,
    accs: &[f64],
) -> PayoffVector {
    assert!(!rounds.is_empty(), "no round contributions");
    let n = rounds[0].values.len();
    let mut payoff = vec![0.0; n];
    for rc in rounds {
        let sum = rc.values.sum();
        if sum <= ROUND_SUM_TOL {
            continue;
        }
        let acc = if accuracy_weighting {
            accs[rc.t - 1]
        } else {
            1.0
        };
        let weight = lambda.powi(rc.t as i32 - 1) * acc;
        for (i, p) in payoff.iter_mut().enumerate() {
            *p += weight * rc.values.get(i) / sum;
        }
    }
    PayoffVector::new(payoff)
}
