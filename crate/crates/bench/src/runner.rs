use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use fedce_data::{inject_noise, partition_iid, synth_dataset, MnistPaths, NoisePlan};
use fedce_game::{
    least_core, load_game_file, shapley_exact, Coalition, Game, GameError, PayoffVector,
};
use fedce_learn::{evaluate, init_params, EvalSet, MlpSpec, ModelSpec, OptimizerKind, SgdConfig};
use fedce_lp::Simplex;
use fedce_methods::{
    federated_shapley, lambda_mr, or_least_core, or_shapley, reputation, round_loo, BankBudget,
    CeError, LooWeighting, MrConfig,
};
use fedce_sim::{derive_seed, retrain_coalition, run_federation, ClientState, FederationConfig};

use crate::config::{DatasetKind, ExperimentConfig, Method, ModelKind};
use crate::metrics::normalize_payoffs;
use crate::report::emit_report;
use crate::BenchError;

// Sub-seed purposes, mixed with the experiment seed.
const PURPOSE_DATA: usize = 1;
const PURPOSE_SHUFFLE: usize = 2;
const PURPOSE_PARTITION: usize = 3;
const PURPOSE_NOISE: usize = 4;
const PURPOSE_FEDERATION: usize = 5;

fn sub_seed(seed: u64, purpose: usize) -> u64 {
    derive_seed(seed, purpose, 0)
}

struct PayoffRow {
    method: &'static str,
    seed: u64,
    client: usize,
    noise_rate: f64,
    raw: f64,
    normalized: f64,
}

/// Run every configured method over every seed and write the results
/// directory. Returns the output directory path.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<PathBuf, BenchError> {
    cfg.validate()?;
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config_echo.txt"), cfg.canonical_text())?;

    match cfg.dataset {
        DatasetKind::GameFile => run_game_file(cfg, &dir)?,
        DatasetKind::Mnist | DatasetKind::Synthetic => run_federated(cfg, &dir)?,
    }
    emit_report(&dir)?;
    Ok(dir)
}

fn model_spec(cfg: &ExperimentConfig, input_dim: usize, num_classes: usize) -> ModelSpec {
    match cfg.model {
        ModelKind::Mlp => ModelSpec::Mlp(MlpSpec::new(
            input_dim,
            cfg.hidden_units,
            num_classes,
            cfg.dropout,
        )),
        ModelKind::Logistic => ModelSpec::Logistic {
            input_dim,
            num_classes,
        },
    }
}

fn federation_config(cfg: &ExperimentConfig, model: ModelSpec, seed: u64) -> FederationConfig {
    FederationConfig {
        num_rounds: cfg.rounds,
        local_epochs: cfg.local_epochs,
        optimizer: SgdConfig {
            lr: cfg.lr,
            momentum: cfg.momentum,
            batch_size: cfg.batch_size,
            epochs: cfg.local_epochs,
            optimizer: OptimizerKind::SgdMomentum,
        },
        seed: sub_seed(seed, PURPOSE_FEDERATION),
        model,
    }
}

/// Build the per-seed clients (partitioned, noise-injected) and test set.
fn build_clients(
    cfg: &ExperimentConfig,
    seed: u64,
    mnist: Option<&(EvalSet, EvalSet)>,
) -> Result<(Vec<ClientState>, EvalSet, usize, usize), BenchError> {
    let n = cfg.num_clients;
    let plan = NoisePlan::linear(n);

    let (train, test, input_dim, num_classes) = match cfg.dataset {
        DatasetKind::Synthetic => {
            let classes = cfg.synth_classes;
            let total = n * cfg.samples_per_client + cfg.test_samples;
            let per_class = total.div_ceil(classes);
            let all = synth_dataset(
                classes,
                cfg.synth_dim,
                per_class,
                cfg.synth_separation,
                sub_seed(seed, PURPOSE_DATA),
            );
            let mut shuffled = partition_iid(&all, 1, sub_seed(seed, PURPOSE_SHUFFLE))?;
            let shuffled = shuffled.remove(0);
            let train_end = n * cfg.samples_per_client;
            let test_end = (train_end + cfg.test_samples).min(shuffled.len());
            let idx: Vec<usize> = (0..shuffled.len()).collect();
            (
                shuffled.subset(&idx[..train_end]),
                shuffled.subset(&idx[train_end..test_end]),
                cfg.synth_dim,
                classes,
            )
        }
        DatasetKind::Mnist => {
            let (train_full, test_full) = mnist.expect("mnist preloaded");
            let need = n * cfg.samples_per_client;
            if train_full.len() < need {
                return Err(BenchError::Config(format!(
                    "num_clients * samples_per_client = {need} exceeds the {} training samples",
                    train_full.len()
                )));
            }
            let mut shuffled = partition_iid(train_full, 1, sub_seed(seed, PURPOSE_SHUFFLE))?;
            let shuffled = shuffled.remove(0);
            let idx: Vec<usize> = (0..need).collect();
            let train = shuffled.subset(&idx);
            let test_take: Vec<usize> = (0..cfg.test_samples.min(test_full.len())).collect();
            (train, test_full.subset(&test_take), 784, 10)
        }
        DatasetKind::GameFile => unreachable!("game-file runs do not build clients"),
    };

    let shards = partition_iid(&train, n, sub_seed(seed, PURPOSE_PARTITION))?;
    let clients: Vec<ClientState> = shards
        .into_iter()
        .enumerate()
        .map(|(id, shard)| {
            let rate = plan.rates[id];
            let dataset = if rate > 0.0 {
                inject_noise(
                    &shard,
                    rate,
                    num_classes,
                    sub_seed(seed, PURPOSE_NOISE).wrapping_add(id as u64),
                )
            } else {
                shard
            };
            ClientState {
                id,
                dataset,
                noise_rate: rate,
            }
        })
        .collect();
    Ok((clients, test, input_dim, num_classes))
}

enum MethodOutcome {
    Payoffs(Vec<f64>),
    Skipped(String),
}

/// Caps and memory budgets produce a graceful skip; anything else is a hard
/// error.
fn ce_outcome(result: Result<PayoffVector, CeError>) -> Result<MethodOutcome, BenchError> {
    match result {
        Ok(p) => Ok(MethodOutcome::Payoffs(p.into())),
        Err(CeError::MemoryBudgetExceeded {
            needed_bytes,
            cap_bytes,
        }) => Ok(MethodOutcome::Skipped(format!(
            "memory budget: bank needs {needed_bytes} bytes, cap {cap_bytes}"
        ))),
        Err(CeError::Game(GameError::PlayerCountExceeded { n, cap })) => Ok(
            MethodOutcome::Skipped(format!("player cap: n={n} above {cap}")),
        ),
        Err(e) => Err(e.into()),
    }
}

fn game_outcome(result: Result<PayoffVector, GameError>) -> Result<MethodOutcome, BenchError> {
    match result {
        Ok(p) => Ok(MethodOutcome::Payoffs(p.into())),
        Err(GameError::PlayerCountExceeded { n, cap }) => Ok(MethodOutcome::Skipped(format!(
            "player cap: n={n} above {cap}"
        ))),
        Err(e) => Err(e.into()),
    }
}

fn run_federated(cfg: &ExperimentConfig, dir: &Path) -> Result<(), BenchError> {
    let mnist = if cfg.dataset == DatasetKind::Mnist {
        let mnist_dir = cfg
            .mnist_dir
            .clone()
            .or_else(|| std::env::var("FEDCE_MNIST_DIR").ok().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("data/mnist"));
        let paths = MnistPaths::locate(&mnist_dir).ok_or_else(|| {
            BenchError::Config(format!(
                "MNIST files not found in {} (set mnist_dir or FEDCE_MNIST_DIR)",
                mnist_dir.display()
            ))
        })?;
        Some((paths.load_train()?, paths.load_test()?))
    } else {
        None
    };

    let budget = BankBudget::from_megabytes(cfg.bank_cap_mb);
    let simplex = Simplex::new();

    let mut payoff_rows: Vec<PayoffRow> = Vec::new();
    let mut run_rows: Vec<String> = Vec::new();
    let mut timing_rows: Vec<(String, u64, f64)> = Vec::new();
    let mut skip_rows: Vec<(String, u64, String)> = Vec::new();

    for &seed in &cfg.seeds {
        let (clients, test, input_dim, num_classes) = build_clients(cfg, seed, mnist.as_ref())?;
        let model = model_spec(cfg, input_dim, num_classes);
        let fed_cfg = federation_config(cfg, model, seed);

        let train_start = Instant::now();
        let logs = run_federation(&clients, &fed_cfg, &test)?;
        let t_train = train_start.elapsed().as_secs_f64();
        let final_acc = logs.last().expect("rounds >= 1").test_acc_after;
        run_rows.push(format!("{seed},{final_acc},{t_train}"));

        let noise_rates: Vec<f64> = clients.iter().map(|c| c.noise_rate).collect();
        for &method in &cfg.methods {
            let started = Instant::now();
            let outcome = match method {
                Method::OrShapley => ce_outcome(or_shapley(&logs, &test, budget))?,
                Method::OrLc => {
                    ce_outcome(or_least_core(&logs, &test, &simplex, budget).map(|s| s.payoff))?
                }
                Method::Loo => ce_outcome(round_loo(&logs, &test, LooWeighting::Unweighted))?,
                Method::LooLinear => ce_outcome(round_loo(&logs, &test, LooWeighting::Linear))?,
                Method::Reputation => ce_outcome(reputation(&logs, &test))?,
                Method::LambdaMr => ce_outcome(lambda_mr(
                    &logs,
                    &test,
                    &MrConfig::lambda_mr(cfg.lambda),
                    budget,
                ))?,
                Method::TruncatedMr => ce_outcome(truncated(cfg, &logs, &test, budget))?,
                Method::FedShapley => {
                    ce_outcome(federated_shapley(&logs, &test, budget).map(|(totals, _)| totals))?
                }
                Method::ExactShapley => {
                    let game = retrain_game(&clients, &fed_cfg, &test);
                    game_outcome(shapley_exact(&game))?
                }
                Method::ExactLc => {
                    let game = retrain_game(&clients, &fed_cfg, &test);
                    game_outcome(least_core(&game, &simplex).map(|s| s.payoff))?
                }
            };
            let elapsed = started.elapsed().as_secs_f64();
            match outcome {
                MethodOutcome::Payoffs(raw) => {
                    timing_rows.push((method.name().to_string(), seed, elapsed));
                    let normalized = normalize_payoffs(&PayoffVector::new(raw.clone()));
                    for (client, &value) in raw.iter().enumerate() {
                        payoff_rows.push(PayoffRow {
                            method: method.name(),
                            seed,
                            client,
                            noise_rate: noise_rates[client],
                            raw: value,
                            normalized: normalized.values.get(client),
                        });
                    }
                }
                MethodOutcome::Skipped(reason) => {
                    skip_rows.push((method.name().to_string(), seed, reason));
                }
            }
        }
    }

    write_outputs(dir, payoff_rows, run_rows, timing_rows, skip_rows)
}

fn truncated(
    cfg: &ExperimentConfig,
    logs: &[fedce_sim::RoundLog],
    test: &EvalSet,
    budget: BankBudget,
) -> Result<PayoffVector, CeError> {
    let mr = MrConfig::truncated(cfg.lambda, cfg.truncation_threshold);
    fedce_methods::truncated_mr(logs, test, &mr, budget)
}

/// Ground-truth game for the retraining baselines: the empty coalition
/// evaluates the shared initialization (normalized away), every other
/// coalition retrains from scratch.
fn retrain_game(clients: &[ClientState], fed_cfg: &FederationConfig, test: &EvalSet) -> Game {
    let clients = clients.to_vec();
    let fed_cfg = fed_cfg.clone();
    let test = test.clone();
    let n = clients.len();
    Game::new(n, move |coalition: Coalition| {
        if coalition.is_empty() {
            let init = init_params(fed_cfg.model, fed_cfg.seed);
            evaluate(&init, &test).expect("evaluation")
        } else {
            retrain_coalition(coalition, &clients, &fed_cfg, &test).expect("retraining")
        }
    })
}

fn run_game_file(cfg: &ExperimentConfig, dir: &Path) -> Result<(), BenchError> {
    let path = cfg.game_file.as_ref().expect("validated");
    let game = load_game_file(path)?;
    let n = game.n();
    let simplex = Simplex::new();

    let mut payoff_rows: Vec<PayoffRow> = Vec::new();
    let mut timing_rows: Vec<(String, u64, f64)> = Vec::new();
    let mut skip_rows: Vec<(String, u64, String)> = Vec::new();

    for &method in &cfg.methods {
        let started = Instant::now();
        let outcome = match method {
            Method::ExactShapley => game_outcome(shapley_exact(&game))?,
            Method::ExactLc => game_outcome(least_core(&game, &simplex).map(|s| s.payoff))?,
            other => MethodOutcome::Skipped(format!(
                "{} needs federation round logs; game files carry none",
                other.name()
            )),
        };
        let elapsed = started.elapsed().as_secs_f64();
        match outcome {
            MethodOutcome::Payoffs(raw) => {
                timing_rows.push((method.name().to_string(), 0, elapsed));
                let normalized = normalize_payoffs(&PayoffVector::new(raw.clone()));
                for (client, &value) in raw.iter().enumerate() {
                    payoff_rows.push(PayoffRow {
                        method: method.name(),
                        seed: 0,
                        client,
                        noise_rate: 0.0,
                        raw: value,
                        normalized: normalized.values.get(client),
                    });
                }
            }
            MethodOutcome::Skipped(reason) => {
                skip_rows.push((method.name().to_string(), 0, reason));
            }
        }
    }

    let grand = game.grand_value();
    let run_rows = vec![format!("0,{grand},0")];
    let _ = n;
    write_outputs(dir, payoff_rows, run_rows, timing_rows, skip_rows)
}

fn write_outputs(
    dir: &Path,
    mut payoff_rows: Vec<PayoffRow>,
    run_rows: Vec<String>,
    mut timing_rows: Vec<(String, u64, f64)>,
    mut skip_rows: Vec<(String, u64, String)>,
) -> Result<(), BenchError> {
    payoff_rows.sort_by(|a, b| (a.method, a.seed, a.client).cmp(&(b.method, b.seed, b.client)));
    let mut payoffs = String::from("method,seed,client,noise_rate,raw_payoff,normalized_payoff\n");
    for row in &payoff_rows {
        payoffs.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.method, row.seed, row.client, row.noise_rate, row.raw, row.normalized
        ));
    }
    fs::write(dir.join("payoffs.csv"), payoffs)?;

    let mut runs = String::from("seed,final_acc,t_train_secs\n");
    for row in &run_rows {
        runs.push_str(row);
        runs.push('\n');
    }
    fs::write(dir.join("runs.csv"), runs)?;

    timing_rows.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    let mut timings = String::from("method,seed,t_method_secs\n");
    for (method, seed, secs) in &timing_rows {
        timings.push_str(&format!("{method},{seed},{secs}\n"));
    }
    fs::write(dir.join("timings.csv"), timings)?;

    skip_rows.sort_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)));
    let mut skipped = String::from("method,seed,reason\n");
    for (method, seed, reason) in &skip_rows {
        skipped.push_str(&format!("{method},{seed},{reason}\n"));
    }
    fs::write(dir.join("skipped.csv"), skipped)?;
    Ok(())
}
