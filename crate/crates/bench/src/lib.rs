//! Experiment runner for the label-noise contribution-evaluation benchmark.
//!
//! A run takes a flat key-value config, builds clients with linearly spaced
//! noise rates, trains one federation per seed, scores every configured CE
//! method on the shared round logs, and writes machine-readable CSVs plus a
//! plain-text summary. See the README for the config keys and CSV schemas.

mod config;
mod metrics;
mod report;
mod runner;

pub use config::{DatasetKind, ExperimentConfig, Method, ModelKind};
pub use metrics::{normalize_payoffs, spearman, NormalizedPayoffs};
pub use report::emit_report;
pub use runner::run_experiment;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),
    #[error("no results found in {0} (expected payoffs.csv)")]
    MissingResults(String),
    #[error("malformed results file {file}: {detail}")]
    MalformedResults { file: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Idx(#[from] fedce_data::IdxError),
    #[error(transparent)]
    Partition(#[from] fedce_data::PartitionError),
    #[error(transparent)]
    Sim(#[from] fedce_sim::SimError),
    #[error(transparent)]
    Ce(#[from] fedce_methods::CeError),
    #[error(transparent)]
    Game(#[from] fedce_game::GameError),
    #[error(transparent)]
    GameFile(#[from] fedce_game::GameFileError),
    #[error(transparent)]
    Learn(#[from] fedce_learn::LearnError),
}
