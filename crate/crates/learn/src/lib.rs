//! Minimal deterministic trainable models over flat parameter vectors:
//! multinomial logistic regression and a two-layer rectifier MLP with
//! hidden-layer dropout, trained by minibatch SGD with momentum (or Adam)
//! on cross-entropy loss. Gradients are hand-derived and checked against
//! central finite differences.
//!
//! Everything is a pure function of `(parameters, data, config, seed)`:
//! shuffling and dropout masks come from a seeded ChaCha stream, so repeated
//! runs are bit-identical. Computation is in f64; the on-disk checkpoint
//! format is a little-endian f32 array with a layout header (see
//! [`ParamVector::to_bytes`]).

mod dataset;
mod gradcheck;
mod model;
mod params;
mod train;

pub use dataset::EvalSet;
pub use gradcheck::gradient_check;
pub use model::mean_loss;
pub use params::{MlpSpec, ModelSpec, ParamCodecError, ParamVector};
pub use train::{evaluate, init_params, train_local, OptimizerKind, SgdConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("label {label} outside 0..{num_classes}")]
    LabelOutOfRange { label: usize, num_classes: usize },
    #[error("feature dimension {found} does not match model input {expected}")]
    DimensionMismatch { found: usize, expected: usize },
}
