//! Dataset plumbing for the benchmark: MNIST IDX ingestion (plain or
//! gzipped), synthetic Gaussian-blob classification data, IID partitioning
//! across clients, and symmetric label-noise injection. Every operation is
//! deterministic given its seed.

mod idx;
mod mnist;
mod noise;
mod partition;
mod synth;

pub use idx::{load_idx, IdxError};
pub use mnist::MnistPaths;
pub use noise::{inject_noise, NoisePlan};
pub use partition::{partition_iid, PartitionError};
pub use synth::synth_dataset;
