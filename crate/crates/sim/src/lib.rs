//! Synchronous FedAvg simulator with full client participation. One run
//! produces a [`RoundLog`] per round carrying everything the contribution
//! evaluation methods need: the global model before and after the round,
//! every client's update delta, dataset sizes, and the post-round test
//! accuracy.
//!
//! Determinism: the whole log list is a pure function of
//! `(clients, config, test set)`. Per-client training seeds are derived as a
//! hash of `(federation seed, round, client id)`, so retraining a coalition
//! leaves the remaining clients' randomness untouched.

mod federation;
mod logdir;

pub use federation::{
    aggregate_weighted, derive_seed, retrain_coalition, run_federation, ClientState,
    FederationConfig, RoundLog,
};
pub use logdir::{dump_round_logs, load_round_logs};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("federation needs at least one client")]
    NoClients,
    #[error("cannot retrain the empty coalition; its utility is 0 by normalization")]
    EmptyCoalition,
    #[error(transparent)]
    Learn(#[from] fedce_learn::LearnError),
    #[error(transparent)]
    Codec(#[from] fedce_learn::ParamCodecError),
    #[error("round log directory: {0}")]
    Manifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
