use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use fedce_learn::EvalSet;

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("cannot split {samples} samples across {clients} clients")]
    TooFewSamples { samples: usize, clients: usize },
}

/// IID partition: a seeded shuffle followed by contiguous equal-size shards,
/// with the remainder going to the last shard. The shards' union is the
/// input set.
pub fn partition_iid(
    data: &EvalSet,
    num_clients: usize,
    seed: u64,
) -> Result<Vec<EvalSet>, PartitionError> {
    assert!(num_clients >= 1, "need at least one client");
    if data.len() < num_clients {
        return Err(PartitionError::TooFewSamples {
            samples: data.len(),
            clients: num_clients,
        });
    }
    let mut indices: Vec<usize> = (0..data.len()).collect();
    indices.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let shard = data.len() / num_clients;
    let mut parts = Vec::with_capacity(num_clients);
    for k in 0..num_clients {
        let start = k * shard;
        let end = if k + 1 == num_clients {
            data.len()
        } else {
            start + shard
        };
        parts.push(data.subset(&indices[start..end]));
    }
    Ok(parts)
}
