use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{accuracy, check_match, loss_and_grad};
use crate::{EvalSet, LearnError, MlpSpec, ModelSpec, ParamVector};

/// Local optimizer configuration. SGD with momentum is the default; Adam is
/// available as an alternative sharing the same learning rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgdConfig {
    pub lr: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub optimizer: OptimizerKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    SgdMomentum,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl OptimizerKind {
    pub fn adam_default() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl SgdConfig {
    /// The benchmark setup: lr 0.01, momentum 0.5, batch 64, 10 epochs.
    pub fn benchmark_default() -> Self {
        SgdConfig {
            lr: 0.01,
            momentum: 0.5,
            batch_size: 64,
            epochs: 10,
            optimizer: OptimizerKind::SgdMomentum,
        }
    }

    fn validate(&self) {
        assert!(self.lr > 0.0, "learning rate must be positive");
        assert!(
            (0.0..1.0).contains(&self.momentum),
            "momentum outside [0,1)"
        );
        assert!(self.batch_size > 0, "batch size must be positive");
    }
}

/// Deterministic initialization: weights uniform in
/// `(-1/sqrt(fan_in), 1/sqrt(fan_in))`, biases zero.
pub fn init_params(spec: ModelSpec, seed: u64) -> ParamVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ParamVector::zeros(spec);
    match spec {
        ModelSpec::Logistic {
            input_dim,
            num_classes,
        } => {
            fill_uniform(
                &mut rng,
                params.values_mut(),
                0,
                input_dim * num_classes,
                input_dim,
            );
        }
        ModelSpec::Mlp(MlpSpec {
            input_dim,
            hidden_units,
            num_classes,
            ..
        }) => {
            let w1 = input_dim * hidden_units;
            fill_uniform(&mut rng, params.values_mut(), 0, w1, input_dim);
            let w2_start = w1 + hidden_units;
            fill_uniform(
                &mut rng,
                params.values_mut(),
                w2_start,
                w2_start + hidden_units * num_classes,
                hidden_units,
            );
        }
    }
    params
}

fn fill_uniform(rng: &mut ChaCha8Rng, values: &mut [f64], from: usize, to: usize, fan_in: usize) {
    let bound = 1.0 / (fan_in as f64).sqrt();
    for v in &mut values[from..to] {
        *v = rng.random_range(-bound..bound);
    }
}

/// Train a copy of `params` on `data` for `cfg.epochs` passes of minibatch
/// optimization. Shuffling and dropout masks are derived from `seed`, so the
/// result is a pure function of its arguments. Momentum (or Adam moment)
/// buffers start at zero.
pub fn train_local(
    params: &ParamVector,
    data: &EvalSet,
    cfg: &SgdConfig,
    seed: u64,
) -> Result<ParamVector, LearnError> {
    cfg.validate();
    if data.is_empty() {
        return Err(LearnError::EmptyDataset);
    }
    check_match(params, data)?;

    let mut current = params.clone();
    if cfg.epochs == 0 {
        return Ok(current);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dropout = match params.layout() {
        ModelSpec::Mlp(spec) if spec.dropout_p > 0.0 => Some(spec),
        _ => None,
    };

    let mut velocity = vec![0.0; current.len()];
    let mut adam_m = Vec::new();
    let mut adam_v = Vec::new();
    if matches!(cfg.optimizer, OptimizerKind::Adam { .. }) {
        adam_m = vec![0.0; current.len()];
        adam_v = vec![0.0; current.len()];
    }
    let mut step = 0u32;

    let mut indices: Vec<usize> = (0..data.len()).collect();
    for _epoch in 0..cfg.epochs {
        indices.shuffle(&mut rng);
        for chunk in indices.chunks(cfg.batch_size) {
            let batch = data.subset(chunk);
            let mask = dropout.map(|spec| {
                let keep = 1.0 - spec.dropout_p;
                // Inverted scaling: kept units are amplified so evaluation
                // needs no rescale.
                Array2::from_shape_fn((chunk.len(), spec.hidden_units), |_| {
                    if rng.random::<f64>() < keep {
                        1.0 / keep
                    } else {
                        0.0
                    }
                })
            });
            let (_, grads) = loss_and_grad(
                &current,
                &batch.features().view(),
                batch.labels(),
                mask.as_ref(),
            );

            step += 1;
            match cfg.optimizer {
                OptimizerKind::SgdMomentum => {
                    let values = current.values_mut();
                    for ((p, vel), g) in values.iter_mut().zip(&mut velocity).zip(grads.values()) {
                        *vel = cfg.momentum * *vel + g;
                        *p -= cfg.lr * *vel;
                    }
                }
                OptimizerKind::Adam { beta1, beta2, eps } => {
                    let bc1 = 1.0 - beta1.powi(step as i32);
                    let bc2 = 1.0 - beta2.powi(step as i32);
                    let values = current.values_mut();
                    for (((p, m), v), g) in values
                        .iter_mut()
                        .zip(&mut adam_m)
                        .zip(&mut adam_v)
                        .zip(grads.values())
                    {
                        *m = beta1 * *m + (1.0 - beta1) * g;
                        *v = beta2 * *v + (1.0 - beta2) * g * g;
                        let m_hat = *m / bc1;
                        let v_hat = *v / bc2;
                        *p -= cfg.lr * m_hat / (v_hat.sqrt() + eps);
                    }
                }
            }
        }
    }
    Ok(current)
}

/// Accuracy of `params` on `data`, dropout disabled.
pub fn evaluate(params: &ParamVector, data: &EvalSet) -> Result<f64, LearnError> {
    accuracy(params, data)
}
