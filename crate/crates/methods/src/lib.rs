//! Contribution-evaluation methods for federated learning, computed from
//! federation round logs instead of coalition retraining.
//!
//! The centerpiece is the [`PseudoModelBank`]: one approximate model per
//! coalition, advanced every round by the coalition-restricted, size-weighted
//! combination of the clients' update deltas. Evaluating the bank yields a
//! coalition game per round (or at the end of training), on which the
//! classical solution concepts run:
//!
//! - [`or_shapley`] — exact Shapley value over the final pseudo-models
//! - [`federated_shapley`] — per-round Shapley values summed across rounds
//! - [`lambda_mr`] — decay-weighted, per-round-normalized round contributions
//! - [`truncated_mr`] — decay truncation plus accuracy weighting
//! - [`or_least_core`] — least core over the final pseudo-models
//! - [`round_loo`] / [`reputation`] — round-level leave-one-out and its
//!   Heaviside average
//!
//! All methods consume the same `RoundLog` list (in-memory or reloaded from a
//! dump directory) and are deterministic.

mod bank;
mod loo;
mod mr;

pub use bank::{BankBudget, PseudoModelBank};
pub use loo::{reputation, round_loo, round_loo_values, LooWeighting};
pub use mr::{
    federated_shapley, lambda_mr, lambda_mr_from_contributions, or_least_core, or_shapley,
    truncated_mr, truncated_mr_from_contributions, MrConfig, RoundContribution,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CeError {
    #[error("round {found} applied to a bank at round {expected}")]
    RoundOrderViolation { expected: usize, found: usize },
    #[error("pseudo-model bank needs {needed_bytes} bytes, over the {cap_bytes}-byte budget")]
    MemoryBudgetExceeded {
        needed_bytes: usize,
        cap_bytes: usize,
    },
    #[error("truncated MR requires a truncation threshold")]
    MissingTruncationThreshold,
    #[error("no rounds to evaluate")]
    NoRounds,
    #[error(transparent)]
    Game(#[from] fedce_game::GameError),
    #[error(transparent)]
    Learn(#[from] fedce_learn::LearnError),
}
