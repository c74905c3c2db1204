//! Characteristic-function (coalitional) games and their classical solution
//! concepts: exact and Monte Carlo Shapley values, core and epsilon-core
//! membership, the least core (exact and sampled), and the nucleolus.
//!
//! Games are normalized on construction so that the empty coalition is worth
//! exactly zero; utilities with a nonzero baseline (such as the accuracy of
//! an untrained model) have that baseline subtracted. This keeps the
//! efficiency and null-player axioms in their textbook form.
//!
//! All solvers are deterministic: sampling is driven by explicit seeds and
//! reductions run in coalition-index order, so results are reproducible
//! bit-for-bit regardless of how the utility oracle is warmed up.

mod coalition;
mod core_check;
mod game;
mod game_file;
mod least_core;
mod nucleolus;
mod payoff;
mod sampling;
mod shapley;

pub use coalition::Coalition;
pub use core_check::{core_membership, CoreCheck};
pub use game::{Game, GameError, UtilityOracle};
pub use game_file::{load_game_file, parse_game_file, GameFileError};
pub use least_core::{
    least_core, least_core_monte_carlo, least_core_with_cap, LeastCoreSolution, McLeastCoreParams,
    McLeastCoreSolution,
};
pub use nucleolus::{nucleolus, nucleolus_with_cap};
pub use payoff::PayoffVector;
pub use sampling::{CoalitionSampler, PermutationSampler};
pub use shapley::{shapley_exact, shapley_exact_with_cap, shapley_monte_carlo};

/// Default player-count caps guarding the exponential solvers. All of them
/// are configurable through the `*_with_cap` variants.
pub mod caps {
    /// Exact Shapley and full core enumeration (2^n utility evaluations).
    pub const EXACT_ENUMERATION: usize = 20;
    /// Exact least core (2^n - 1 LP constraints).
    pub const LEAST_CORE: usize = 16;
    /// Nucleolus (a sequence of least-core LPs).
    pub const NUCLEOLUS: usize = 10;
    /// Hard representation limit of [`crate::Coalition`].
    pub const MAX_PLAYERS: usize = 24;
}
