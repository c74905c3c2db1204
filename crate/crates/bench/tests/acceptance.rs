//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (`cargo test --test acceptance -- --nocapture` to see them all).
//!
//! Heavy criteria (the MNIST replication and the monotonicity sweep) train
//! real federations; the whole suite is sized for a desk-class CPU.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, UnwindSafe};
use std::path::PathBuf;
use std::time::Instant;

use fedce_bench::{
    normalize_payoffs, run_experiment, spearman, DatasetKind, ExperimentConfig, Method, ModelKind,
};
use fedce_data::{partition_iid, synth_dataset};
use fedce_game::{
    core_membership, least_core, least_core_monte_carlo, nucleolus, shapley_exact,
    shapley_monte_carlo, Coalition, CoalitionSampler, Game, McLeastCoreParams, PayoffVector,
    PermutationSampler,
};
use fedce_learn::{evaluate, gradient_check, EvalSet, MlpSpec, ModelSpec, ParamVector, SgdConfig};
use fedce_lp::Simplex;
use fedce_methods::{or_least_core, BankBudget};
use fedce_sim::{run_federation, ClientState, FederationConfig, RoundLog};

fn criterion(id: u32, name: &str, body: impl FnOnce() + UnwindSafe) {
    let started = Instant::now();
    let result = catch_unwind(body);
    let status = if result.is_ok() { "PASS" } else { "FAIL" };
    println!(
        "ACCEPTANCE {id} ({name}): {status} [{:.1}s]",
        started.elapsed().as_secs_f64()
    );
    if let Err(e) = result {
        std::panic::resume_unwind(e);
    }
}

fn out_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fedce-acceptance-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn mnist_dir() -> PathBuf {
    std::env::var("FEDCE_MNIST_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|_| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/mnist"))
}

/// Seeded random utility table with v(empty) = 0 and values in [0, 1).
fn random_table(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut table: Vec<f64> = (0..1usize << n)
        .map(|_| rng.random_range(0.0..1.0))
        .collect();
    table[0] = 0.0;
    table
}

fn table_game(n: usize, table: Vec<f64>) -> Game {
    Game::new(n, move |c: Coalition| table[c.mask() as usize])
}

#[test]
fn criterion_01_axiom_suite() {
    criterion(1, "axiom suite on 200 random games", || {
        let started = Instant::now();
        for case in 0..200u64 {
            let n = 2 + (case % 7) as usize; // 2..=8
            let table = random_table(n, 1000 + case);
            let grand = table[(1 << n) - 1];

            // Efficiency.
            let phi = shapley_exact(&table_game(n, table.clone())).unwrap();
            assert!(
                (phi.sum() - grand).abs() < 1e-9,
                "case {case}: efficiency violated by {:e}",
                (phi.sum() - grand).abs()
            );

            // Null player: v'(S) = v(S without k) makes k null exactly.
            let k = (case as usize) % n;
            let t2 = table.clone();
            let null_game = Game::new(n, move |c: Coalition| t2[c.without(k).mask() as usize]);
            let phi_null = shapley_exact(&null_game).unwrap();
            assert_eq!(
                phi_null.get(k),
                0.0,
                "case {case}: null player not exact zero"
            );

            // Symmetry: symmetrize players i and j by swap-averaging.
            let (i, j) = (0, 1 + (case as usize) % (n - 1));
            let t3 = table.clone();
            let swap = move |mask: u32| -> u32 {
                let bi = (mask >> i) & 1;
                let bj = (mask >> j) & 1;
                (mask & !((1 << i) | (1 << j))) | (bi << j) | (bj << i)
            };
            let sym_game = Game::new(n, move |c: Coalition| {
                0.5 * (t3[c.mask() as usize] + t3[swap(c.mask()) as usize])
            });
            let phi_sym = shapley_exact(&sym_game).unwrap();
            assert!(
                (phi_sym.get(i) - phi_sym.get(j)).abs() < 1e-12,
                "case {case}: symmetric players got {} vs {}",
                phi_sym.get(i),
                phi_sym.get(j)
            );

            // Additivity.
            let other = random_table(n, 5000 + case);
            let sum_table: Vec<f64> = table.iter().zip(&other).map(|(a, b)| a + b).collect();
            let phi_a = shapley_exact(&table_game(n, table)).unwrap();
            let phi_b = shapley_exact(&table_game(n, other)).unwrap();
            let phi_sum = shapley_exact(&table_game(n, sum_table)).unwrap();
            for p in 0..n {
                assert!(
                    (phi_sum.get(p) - phi_a.get(p) - phi_b.get(p)).abs() < 1e-9,
                    "case {case}: additivity violated at player {p}"
                );
            }
        }
        assert!(
            started.elapsed().as_secs() < 30,
            "axiom suite exceeded 30 s"
        );
    });
}

#[test]
fn criterion_02_oracle_equivalence() {
    criterion(
        2,
        "glove / majority / bargaining vs independent oracles",
        || {
            let simplex = Simplex::new();

            // Glove game: player 0 holds the left glove.
            let glove = Game::new(3, |c: Coalition| {
                if c.contains(0) && (c.contains(1) || c.contains(2)) {
                    1.0
                } else {
                    0.0
                }
            });
            let phi = shapley_exact(&glove).unwrap();
            // Independent oracle: average marginal over all 3! = 6 permutations.
            let perms = [
                [0, 1, 2],
                [0, 2, 1],
                [1, 0, 2],
                [1, 2, 0],
                [2, 0, 1],
                [2, 1, 0],
            ];
            let v = |mask: u32| -> f64 {
                if mask & 1 != 0 && mask & 0b110 != 0 {
                    1.0
                } else {
                    0.0
                }
            };
            let mut oracle = [0.0f64; 3];
            for perm in perms {
                let mut mask = 0u32;
                let mut prev = 0.0;
                for p in perm {
                    mask |= 1 << p;
                    oracle[p] += v(mask) - prev;
                    prev = v(mask);
                }
            }
            for o in &mut oracle {
                *o /= 6.0;
            }
            assert!((oracle[0] - 2.0 / 3.0).abs() < 1e-12 && (oracle[1] - 1.0 / 6.0).abs() < 1e-12);
            for p in 0..3 {
                assert!(
                    (phi.get(p) - oracle[p]).abs() < 1e-7,
                    "glove player {p}: {} vs {}",
                    phi.get(p),
                    oracle[p]
                );
            }

            // Majority game least core: hand solution epsilon* = 1/3 at the
            // equal split (summing the three pair constraints forces it).
            let majority = Game::new(3, |c: Coalition| if c.size() >= 2 { 1.0 } else { 0.0 });
            let lc = least_core(&majority, &simplex).unwrap();
            assert!((lc.epsilon_star - 1.0 / 3.0).abs() < 1e-7);
            for p in 0..3 {
                assert!((lc.payoff.get(p) - 1.0 / 3.0).abs() < 1e-7);
            }

            // Two-player bargaining nucleolus: closed form
            // ((c+a-b)/2, (c+b-a)/2).
            let (a, b, c) = (0.3, 0.6, 1.2);
            let bargaining = Game::new(2, move |s: Coalition| {
                match (s.contains(0), s.contains(1)) {
                    (true, true) => c,
                    (true, false) => a,
                    (false, true) => b,
                    (false, false) => 0.0,
                }
            });
            let nuc = nucleolus(&bargaining, &simplex).unwrap();
            assert!((nuc.get(0) - (c + a - b) / 2.0).abs() < 1e-7);
            assert!((nuc.get(1) - (c + b - a) / 2.0).abs() < 1e-7);
        },
    );
}

#[test]
fn criterion_03_mc_shapley_convergence() {
    criterion(
        3,
        "Monte Carlo Shapley convergence at 100k permutations",
        || {
            let started = Instant::now();
            for game_seed in 0..3u64 {
                let n = 6;
                let table = random_table(n, 42 + game_seed);
                let range = table.iter().cloned().fold(f64::MIN, f64::max)
                    - table.iter().cloned().fold(f64::MAX, f64::min);
                let game = table_game(n, table);
                let exact = shapley_exact(&game).unwrap();
                let mut sampler = PermutationSampler::new(n, 900 + game_seed);
                let estimate = shapley_monte_carlo(&game, &mut sampler, 100_000, None);
                let linf = (0..n)
                    .map(|p| (estimate.get(p) - exact.get(p)).abs())
                    .fold(0.0, f64::max);
                assert!(
                    linf < 0.01 * range,
                    "game {game_seed}: L-infinity error {linf} above 1% of range {range}"
                );
            }
            assert!(started.elapsed().as_secs() < 60, "exceeded 60 s");
        },
    );
}

#[test]
fn criterion_04_mc_least_core_pac_audit() {
    criterion(
        4,
        "sampled least-core PAC audit on the majority game",
        || {
            let game = Game::new(3, |c: Coalition| if c.size() >= 2 { 1.0 } else { 0.0 });
            let simplex = Simplex::new();
            let params = McLeastCoreParams::auto(0.05, 0.1, 0.05, 1.0, 3);
            for seed in 0..50u64 {
                let mut sampler = CoalitionSampler::new(3, seed);
                let mc = least_core_monte_carlo(&game, &params, &mut sampler, &simplex).unwrap();
                let fraction = mc
                    .violation_fraction
                    .expect("n <= 16 audits by enumeration");
                assert!(
                    fraction <= params.delta,
                    "seed {seed}: violation fraction {fraction} above delta {}",
                    params.delta
                );
            }
        },
    );
}

#[test]
fn criterion_05_gradient_check() {
    criterion(5, "manual backprop vs central finite differences", || {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let make_set = |n: usize, dim: usize, classes: usize, rng: &mut rand_chacha::ChaCha8Rng| {
            let features =
                ndarray::Array2::from_shape_fn((n, dim), |_| rng.random_range(-1.0..1.0));
            let labels = (0..n).map(|_| rng.random_range(0..classes)).collect();
            EvalSet::new(features, labels).unwrap()
        };

        let logistic = ModelSpec::Logistic {
            input_dim: 5,
            num_classes: 3,
        };
        let data = make_set(5, 5, 3, &mut rng);
        let err = gradient_check(logistic, &data, 1).unwrap();
        assert!(err < 1e-6, "logistic relative error {err}");

        let mlp = ModelSpec::Mlp(MlpSpec::new(5, 64, 3, 0.0));
        let err = gradient_check(mlp, &data, 2).unwrap();
        assert!(err < 1e-4, "MLP-64 relative error {err}");
    });
}

#[test]
fn criterion_06_mnist_desk_scale_replication() {
    criterion(6, "MNIST n=2 replication of the reported metrics", || {
        let started = Instant::now();
        let cfg = ExperimentConfig {
            dataset: DatasetKind::Mnist,
            mnist_dir: Some(mnist_dir()),
            num_clients: 2,
            methods: vec![Method::OrShapley, Method::Loo],
            seeds: vec![0, 1, 2],
            // Full 60k split: the protocol's equal IID shards of the train
            // set (30000 >= the 5000-sample floor).
            samples_per_client: 30_000,
            test_samples: 10_000,
            output_dir: out_dir("mnist"),
            ..ExperimentConfig::default()
        };
        let dir = run_experiment(&cfg).expect("mnist run");
        let metrics = read_metrics(&dir.join("metrics_n2.csv"));

        let acc = metrics["or-shapley"]["acc_mean"];
        assert!(
            (0.929..=0.969).contains(&acc),
            "final accuracy {acc} outside 94.9 +/- 2.0 points"
        );
        let or_max_dif = metrics["or-shapley"]["max_dif_mean"];
        assert!(
            (0.8..=1.0).contains(&or_max_dif),
            "or-shapley max_dif {or_max_dif} outside [0.8, 1.0]"
        );
        let loo_max_dif = metrics["loo"]["max_dif_mean"];
        assert!(loo_max_dif >= 0.9, "loo max_dif {loo_max_dif} below 0.9");
        assert!(
            started.elapsed().as_secs() < 900,
            "exceeded the 15-minute budget"
        );
    });
}

#[test]
fn criterion_07_monotonicity_and_reputation_uniformity() {
    criterion(
        7,
        "noise monotonicity and reputation near-uniformity",
        || {
            let started = Instant::now();
            for &n in &[4usize, 6] {
                let cfg = ExperimentConfig {
                    dataset: DatasetKind::Synthetic,
                    num_clients: n,
                    seeds: vec![0, 1, 2, 3, 4],
                    rounds: 5,
                    local_epochs: 5,
                    lr: 0.05,
                    model: ModelKind::Logistic,
                    samples_per_client: 400,
                    test_samples: 800,
                    synth_classes: 3,
                    synth_dim: 10,
                    synth_separation: 1.4,
                    output_dir: out_dir(&format!("mono-{n}")),
                    ..ExperimentConfig::default()
                };
                let dir = run_experiment(&cfg).expect("synthetic run");

                // Per-seed Spearman between noise rate and normalized payoff.
                let payoffs = read_payoffs(&dir.join("payoffs.csv"));
                let mut by_method: BTreeMap<String, BTreeMap<u64, Vec<(f64, f64)>>> =
                    BTreeMap::new();
                for (method, seed, _client, rate, _raw, normalized) in payoffs {
                    by_method
                        .entry(method)
                        .or_default()
                        .entry(seed)
                        .or_default()
                        .push((rate, normalized));
                }
                assert_eq!(by_method.len(), 8, "expected all 8 methods to run");
                for (method, seeds) in &by_method {
                    let mut rhos: Vec<f64> = seeds
                        .values()
                        .map(|points| {
                            let rates: Vec<f64> = points.iter().map(|p| p.0).collect();
                            let pays: Vec<f64> = points.iter().map(|p| p.1).collect();
                            spearman(&rates, &pays)
                        })
                        .collect();
                    rhos.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    let median = rhos[rhos.len() / 2];
                    assert!(
                        median <= -0.8,
                        "n={n} {method}: median Spearman {median} above -0.8 ({rhos:?})"
                    );
                }

                // Reputation sits closest to the uniform split.
                let metrics = read_metrics(&dir.join(format!("metrics_n{n}.csv")));
                let rep_dist = metrics["reputation"]["dist_mean"];
                for (method, row) in &metrics {
                    if method != "reputation" {
                        assert!(
                            rep_dist <= row["dist_mean"],
                            "n={n}: reputation dist {rep_dist} above {method}'s {}",
                            row["dist_mean"]
                        );
                    }
                }
            }
            assert!(started.elapsed().as_secs() < 600, "exceeded 10 minutes");
        },
    );
}

#[test]
fn criterion_08_or_lc_properties() {
    criterion(
        8,
        "OR-LC budget, feasibility and enumeration equivalence",
        || {
            // Small real federation: 3 clients, one round.
            let classes = 3;
            let dim = 6;
            let all = synth_dataset(classes, dim, 220, 3.0, 31);
            let mut shuffled = partition_iid(&all, 1, 77).unwrap();
            let shuffled = shuffled.remove(0);
            let idx: Vec<usize> = (0..shuffled.len()).collect();
            let train = shuffled.subset(&idx[..360]);
            let test = shuffled.subset(&idx[360..]);
            let shards = partition_iid(&train, 3, 5).unwrap();
            let clients: Vec<ClientState> = shards
                .into_iter()
                .enumerate()
                .map(|(id, dataset)| ClientState {
                    id,
                    dataset,
                    noise_rate: 0.0,
                })
                .collect();
            let fed = FederationConfig {
                num_rounds: 1,
                local_epochs: 4,
                optimizer: SgdConfig {
                    lr: 0.05,
                    ..SgdConfig::benchmark_default()
                },
                seed: 3,
                model: ModelSpec::Logistic {
                    input_dim: dim,
                    num_classes: classes,
                },
            };
            let logs = run_federation(&clients, &fed, &test).unwrap();

            let simplex = Simplex::new();
            let solution = or_least_core(&logs, &test, &simplex, BankBudget::default()).unwrap();

            // Independent pseudo-model enumeration.
            let v = enumerate_pseudo_utilities(&logs, &test);
            let grand = v[v.len() - 1];
            assert!(
                (solution.payoff.sum() - grand).abs() < 1e-6,
                "budget {} vs normalized grand utility {grand}",
                solution.payoff.sum()
            );

            let entries: Vec<(u32, f64)> =
                v.iter().enumerate().map(|(m, &u)| (m as u32, u)).collect();
            let game = Game::from_table(3, &entries);
            let expected = least_core(&game, &simplex).unwrap();
            assert!(
                (solution.epsilon_star - expected.epsilon_star).abs() < 1e-9,
                "epsilon* {} vs enumerated {}",
                solution.epsilon_star,
                expected.epsilon_star
            );

            let check =
                core_membership(&game, &solution.payoff, solution.epsilon_star + 1e-7).unwrap();
            assert!(check.is_member, "payoff outside the epsilon*-core");
        },
    );
}

#[test]
fn criterion_09_normalization_geometry() {
    criterion(
        9,
        "two-client normalization geometry (dist = max_dif / sqrt 2)",
        || {
            for k in 0..=100 {
                let d = k as f64 / 100.0;
                let raw = PayoffVector::new(vec![(1.0 + d) / 2.0, (1.0 - d) / 2.0]);
                let norm = normalize_payoffs(&raw).values;
                let max_dif = norm.get(0) - norm.get(1);
                assert!((max_dif - d).abs() < 1e-12);
                let dist = ((norm.get(0) - 0.5).powi(2) + (norm.get(1) - 0.5).powi(2)).sqrt();
                assert!(
                    (dist - d / 2f64.sqrt()).abs() < 1e-9,
                    "d={d}: dist {dist} vs {}",
                    d / 2f64.sqrt()
                );
            }
            // The reported pairings: 0.98 -> 0.693, 0.92 -> 0.651.
            assert!((0.98 / 2f64.sqrt() - 0.6930).abs() < 1e-4);
            assert!((0.92 / 2f64.sqrt() - 0.6505).abs() < 1e-4);
        },
    );
}

#[test]
fn criterion_10_determinism() {
    criterion(
        10,
        "identical configs produce byte-identical payoff CSVs",
        || {
            let base = ExperimentConfig {
                dataset: DatasetKind::Synthetic,
                num_clients: 3,
                seeds: vec![0, 1],
                rounds: 3,
                local_epochs: 3,
                lr: 0.05,
                model: ModelKind::Logistic,
                samples_per_client: 120,
                test_samples: 300,
                synth_classes: 3,
                synth_dim: 8,
                synth_separation: 2.0,
                ..ExperimentConfig::default()
            };
            let mut first = base.clone();
            first.output_dir = out_dir("det-a");
            let mut second = base;
            second.output_dir = out_dir("det-b");
            let dir_a = run_experiment(&first).expect("first run");
            let dir_b = run_experiment(&second).expect("second run");
            let a = std::fs::read(dir_a.join("payoffs.csv")).unwrap();
            let b = std::fs::read(dir_b.join("payoffs.csv")).unwrap();
            assert!(a == b, "payoff CSVs differ between identical runs");
        },
    );
}

/// Independent pseudo-model enumeration for criterion 8: advance one model
/// per coalition by the size-weighted restricted update and evaluate,
/// subtracting the shared-init accuracy.
fn enumerate_pseudo_utilities(logs: &[RoundLog], test: &EvalSet) -> Vec<f64> {
    let ids: Vec<usize> = logs[0].sizes.keys().copied().collect();
    let n = ids.len();
    let mut models: Vec<ParamVector> = vec![logs[0].global_before.clone(); 1 << n];
    for log in logs {
        for (mask, model) in models.iter_mut().enumerate().skip(1) {
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let total: f64 = members.iter().map(|&i| log.sizes[&ids[i]] as f64).sum();
            for &i in &members {
                model.add_scaled(
                    &log.local_updates[&ids[i]],
                    log.sizes[&ids[i]] as f64 / total,
                );
            }
        }
    }
    let v0 = evaluate(&logs[0].global_before, test).unwrap();
    models
        .iter()
        .map(|m| evaluate(m, test).unwrap() - v0)
        .collect()
}

/// Parse `metrics_n<k>.csv` into method -> column -> value.
fn read_metrics(path: &std::path::Path) -> BTreeMap<String, BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(path).expect("metrics csv");
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut out = BTreeMap::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let mut row = BTreeMap::new();
        for (name, value) in header.iter().zip(&fields).skip(1) {
            row.insert(name.clone(), value.parse::<f64>().expect("numeric field"));
        }
        out.insert(fields[0].to_string(), row);
    }
    out
}

/// Parse payoffs.csv rows.
#[allow(clippy::type_complexity)]
fn read_payoffs(path: &std::path::Path) -> Vec<(String, u64, usize, f64, f64, f64)> {
    let text = std::fs::read_to_string(path).expect("payoffs csv");
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            (
                f[0].to_string(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
                f[3].parse().unwrap(),
                f[4].parse().unwrap(),
                f[5].parse().unwrap(),
            )
        })
        .collect()
}
