use std::collections::BTreeMap;

use fedce_game::Coalition;
use fedce_learn::{evaluate, init_params, train_local, EvalSet, ModelSpec, ParamVector, SgdConfig};

use crate::SimError;

/// One federation participant.
#[derive(Debug, Clone)]
pub struct ClientState {
    pub id: usize,
    pub dataset: EvalSet,
    /// Label-noise rate this client's shard was injected with (bookkeeping
    /// for reports; the data is already noisy).
    pub noise_rate: f64,
}

impl ClientState {
    pub fn size(&self) -> usize {
        self.dataset.len()
    }
}

#[derive(Debug, Clone)]
pub struct FederationConfig {
    pub num_rounds: usize,
    /// Local passes per round; overrides `optimizer.epochs`.
    pub local_epochs: usize,
    pub optimizer: SgdConfig,
    pub seed: u64,
    pub model: ModelSpec,
}

impl FederationConfig {
    /// The benchmark protocol: 5 rounds of 10 local epochs.
    pub fn benchmark_default(model: ModelSpec, seed: u64) -> Self {
        FederationConfig {
            num_rounds: 5,
            local_epochs: 10,
            optimizer: SgdConfig::benchmark_default(),
            seed,
            model,
        }
    }
}

/// Record of one synchronous round.
#[derive(Debug, Clone)]
pub struct RoundLog {
    /// Round index, 1-based.
    pub t: usize,
    pub global_before: ParamVector,
    /// Per-client update delta: trained local parameters minus
    /// `global_before`.
    pub local_updates: BTreeMap<usize, ParamVector>,
    /// Participants of the round (always the grand coalition here; kept so
    /// partial-participation schemes stay expressible).
    pub participants: Coalition,
    pub sizes: BTreeMap<usize, usize>,
    pub global_after: ParamVector,
    pub test_acc_after: f64,
}

/// Stable per-client training seed: a splitmix64 chain over
/// `(seed, round, client id)`.
pub fn derive_seed(seed: u64, round: usize, client: usize) -> u64 {
    let a = splitmix64(seed);
    let b = splitmix64(a ^ round as u64);
    splitmix64(b ^ client as u64)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// FedAvg aggregation: `base + sum_i (n_i / sum_j n_j) * delta_i`, reduced
/// in the iteration order of `deltas` (callers pass id-ordered maps).
pub fn aggregate_weighted<'a>(
    base: &ParamVector,
    deltas: impl IntoIterator<Item = (&'a ParamVector, usize)>,
) -> ParamVector {
    let items: Vec<(&ParamVector, usize)> = deltas.into_iter().collect();
    let total: usize = items.iter().map(|(_, n)| n).sum();
    assert!(total > 0, "aggregation needs a nonzero total size");
    let mut out = base.clone();
    for (delta, size) in items {
        out.add_scaled(delta, size as f64 / total as f64);
    }
    out
}

/// Run a full-participation federation and log every round.
pub fn run_federation(
    clients: &[ClientState],
    cfg: &FederationConfig,
    test: &EvalSet,
) -> Result<Vec<RoundLog>, SimError> {
    let refs: Vec<&ClientState> = clients.iter().collect();
    run_federation_refs(&refs, cfg, test)
}

fn run_federation_refs(
    clients: &[&ClientState],
    cfg: &FederationConfig,
    test: &EvalSet,
) -> Result<Vec<RoundLog>, SimError> {
    if clients.is_empty() {
        return Err(SimError::NoClients);
    }
    let participants = Coalition::grand(clients.len());
    let sizes: BTreeMap<usize, usize> = clients.iter().map(|c| (c.id, c.size())).collect();

    let mut local_cfg = cfg.optimizer;
    local_cfg.epochs = cfg.local_epochs;

    let mut global = init_params(cfg.model, cfg.seed);
    let mut logs = Vec::with_capacity(cfg.num_rounds);
    for t in 1..=cfg.num_rounds {
        let before = global.clone();
        let mut deltas: BTreeMap<usize, ParamVector> = BTreeMap::new();
        for client in clients {
            let trained = train_local(
                &before,
                &client.dataset,
                &local_cfg,
                derive_seed(cfg.seed, t, client.id),
            )?;
            deltas.insert(client.id, trained.minus(&before));
        }
        global = aggregate_weighted(&before, deltas.iter().map(|(id, delta)| (delta, sizes[id])));
        let test_acc_after = evaluate(&global, test)?;
        logs.push(RoundLog {
            t,
            global_before: before,
            local_updates: deltas,
            participants,
            sizes: sizes.clone(),
            global_after: global.clone(),
            test_acc_after,
        });
    }
    Ok(logs)
}

/// Ground-truth coalition utility: retrain a fresh federation restricted to
/// the coalition's clients (bit `i` selects `clients[i]`) and return the
/// final test accuracy. The model is re-initialized from the same
/// `cfg.seed`, and per-client seeds still key off the original client ids.
pub fn retrain_coalition(
    coalition: Coalition,
    clients: &[ClientState],
    cfg: &FederationConfig,
    test: &EvalSet,
) -> Result<f64, SimError> {
    assert_eq!(
        coalition.player_count(),
        clients.len(),
        "coalition universe does not match the client list"
    );
    if coalition.is_empty() {
        return Err(SimError::EmptyCoalition);
    }
    let members: Vec<&ClientState> = coalition.members().map(|i| &clients[i]).collect();
    let logs = run_federation_refs(&members, cfg, test)?;
    Ok(logs.last().expect("num_rounds >= 1").test_acc_after)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fedce_learn::{MlpSpec, OptimizerKind};
    use std::collections::BTreeMap;

    fn tiny_model() -> ModelSpec {
        ModelSpec::Mlp(MlpSpec::new(2, 4, 2, 0.2))
    }

    fn tiny_cfg(seed: u64) -> FederationConfig {
        FederationConfig {
            num_rounds: 3,
            local_epochs: 2,
            optimizer: SgdConfig {
                lr: 0.05,
                momentum: 0.5,
                batch_size: 4,
                epochs: 999, // overridden by local_epochs
                optimizer: OptimizerKind::SgdMomentum,
            },
            seed,
            model: tiny_model(),
        }
    }

    fn blob_client(id: usize, seed: u64) -> ClientState {
        use ndarray::Array2;
        let n = 16;
        let features = Array2::from_shape_fn((n, 2), |(i, j)| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * (1.0 + 0.05 * ((i * 7 + j * 3 + seed as usize) % 10) as f64)
        });
        let labels = (0..n).map(|i| i % 2).collect();
        ClientState {
            id,
            dataset: fedce_learn::EvalSet::new(features, labels).unwrap(),
            noise_rate: 0.0,
        }
    }

    fn test_set() -> fedce_learn::EvalSet {
        blob_client(0, 99).dataset
    }

    #[test]
    fn single_client_round_equals_local_training() {
        let clients = vec![blob_client(0, 1)];
        let cfg = tiny_cfg(7);
        let logs = run_federation(&clients, &cfg, &test_set()).unwrap();
        assert_eq!(logs.len(), 3);
        for log in &logs {
            // Weight n_0 / n_0 = 1: the aggregate is the local result.
            let mut expected = log.global_before.clone();
            expected.add_scaled(&log.local_updates[&0], 1.0);
            assert!(expected.max_abs_diff(&log.global_after) < 1e-12);
        }
    }

    #[test]
    fn identical_deltas_aggregate_to_themselves() {
        let base = fedce_learn::init_params(tiny_model(), 3);
        let mut delta = fedce_learn::ParamVector::zeros(tiny_model());
        delta.add_scaled(&base, 0.25);
        let agg = aggregate_weighted(&base, [(&delta, 10), (&delta, 30)]);
        let mut expected = base.clone();
        expected.add_scaled(&delta, 1.0);
        assert!(agg.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn unequal_sizes_weight_proportionally() {
        let layout = tiny_model();
        let count = layout.param_count();
        let base = fedce_learn::ParamVector::zeros(layout);
        let mut v0 = vec![0.0; count];
        v0[0] = 7.0;
        let d0 = fedce_learn::ParamVector::new(v0, layout);
        let mut v2 = vec![0.0; count];
        v2[0] = 14.0;
        let d2 = fedce_learn::ParamVector::new(v2, layout);
        // Sizes 2 and 5 out of 7: (2/7)*7 + (5/7)*14 = 12.
        let agg = aggregate_weighted(&base, [(&d0, 2), (&d2, 5)]);
        assert!((agg.values()[0] - 12.0).abs() < 1e-12);
    }

    #[test]
    fn aggregation_identity_holds_in_logs() {
        let clients = vec![blob_client(0, 1), blob_client(1, 2), blob_client(2, 3)];
        let cfg = tiny_cfg(11);
        let logs = run_federation(&clients, &cfg, &test_set()).unwrap();
        for log in &logs {
            let recomputed = aggregate_weighted(
                &log.global_before,
                log.local_updates.iter().map(|(id, d)| (d, log.sizes[id])),
            );
            assert!(recomputed.max_abs_diff(&log.global_after) < 1e-6);
            assert!(log.participants.is_grand());
        }
    }

    #[test]
    fn fully_deterministic_logs() {
        let clients = vec![blob_client(0, 1), blob_client(1, 2)];
        let cfg = tiny_cfg(5);
        let a = run_federation(&clients, &cfg, &test_set()).unwrap();
        let b = run_federation(&clients, &cfg, &test_set()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.global_after, y.global_after);
            assert_eq!(x.test_acc_after.to_bits(), y.test_acc_after.to_bits());
        }
    }

    #[test]
    fn grand_coalition_retrain_matches_run() {
        let clients = vec![blob_client(0, 1), blob_client(1, 2)];
        let cfg = tiny_cfg(13);
        let test = test_set();
        let logs = run_federation(&clients, &cfg, &test).unwrap();
        let v = retrain_coalition(Coalition::grand(2), &clients, &cfg, &test).unwrap();
        assert_eq!(v.to_bits(), logs.last().unwrap().test_acc_after.to_bits());
    }

    #[test]
    fn empty_coalition_rejected() {
        let clients = vec![blob_client(0, 1)];
        let cfg = tiny_cfg(13);
        assert!(matches!(
            retrain_coalition(Coalition::empty(1), &clients, &cfg, &test_set()),
            Err(SimError::EmptyCoalition)
        ));
    }

    #[test]
    fn subset_retraining_reuses_client_seed_streams() {
        // Removing client 1 must not change client 0's local seed.
        assert_eq!(derive_seed(9, 3, 0), derive_seed(9, 3, 0));
        assert_ne!(derive_seed(9, 3, 0), derive_seed(9, 3, 1));
        assert_ne!(derive_seed(9, 3, 0), derive_seed(9, 4, 0));
        assert_ne!(derive_seed(8, 3, 0), derive_seed(9, 3, 0));
    }

    #[test]
    fn sizes_recorded() {
        let clients = vec![blob_client(0, 1), blob_client(1, 2)];
        let cfg = tiny_cfg(1);
        let logs = run_federation(&clients, &cfg, &test_set()).unwrap();
        let expected: BTreeMap<usize, usize> = [(0, 16), (1, 16)].into();
        assert_eq!(logs[0].sizes, expected);
    }
}
