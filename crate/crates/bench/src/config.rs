use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Mnist,
    Synthetic,
    GameFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Mlp,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    OrShapley,
    OrLc,
    Loo,
    LooLinear,
    Reputation,
    LambdaMr,
    FedShapley,
    TruncatedMr,
    ExactShapley,
    ExactLc,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::OrShapley => "or-shapley",
            Method::OrLc => "or-lc",
            Method::Loo => "loo",
            Method::LooLinear => "loo-linear",
            Method::Reputation => "reputation",
            Method::LambdaMr => "lambda-mr",
            Method::FedShapley => "fed-shapley",
            Method::TruncatedMr => "truncated-mr",
            Method::ExactShapley => "exact-shapley",
            Method::ExactLc => "exact-lc",
        }
    }

    /// Methods that score federation round logs (everything except the
    /// retraining baselines).
    pub fn needs_logs(&self) -> bool {
        !matches!(self, Method::ExactShapley | Method::ExactLc)
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "or-shapley" => Ok(Method::OrShapley),
            "or-lc" => Ok(Method::OrLc),
            "loo" => Ok(Method::Loo),
            "loo-linear" => Ok(Method::LooLinear),
            "reputation" => Ok(Method::Reputation),
            "lambda-mr" => Ok(Method::LambdaMr),
            "fed-shapley" => Ok(Method::FedShapley),
            "truncated-mr" => Ok(Method::TruncatedMr),
            "exact-shapley" => Ok(Method::ExactShapley),
            "exact-lc" => Ok(Method::ExactLc),
            other => Err(format!("unknown method {other:?}")),
        }
    }
}

/// One experiment: dataset, client count, methods, seeds and the federation
/// hyperparameters. Defaults follow the benchmark protocol (5 rounds of 10
/// local epochs, SGD lr 0.01 momentum 0.5, MLP-64 with dropout 0.5,
/// lambda 0.8).
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: DatasetKind,
    pub mnist_dir: Option<PathBuf>,
    pub game_file: Option<PathBuf>,
    pub num_clients: usize,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub rounds: usize,
    pub local_epochs: usize,
    pub lr: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub model: ModelKind,
    pub hidden_units: usize,
    pub dropout: f64,
    pub samples_per_client: usize,
    pub test_samples: usize,
    pub lambda: f64,
    pub truncation_threshold: f64,
    pub synth_classes: usize,
    pub synth_dim: usize,
    pub synth_separation: f64,
    pub output_dir: PathBuf,
    pub bank_cap_mb: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetKind::Synthetic,
            mnist_dir: None,
            game_file: None,
            num_clients: 2,
            methods: vec![
                Method::OrShapley,
                Method::OrLc,
                Method::Loo,
                Method::LooLinear,
                Method::Reputation,
                Method::LambdaMr,
                Method::FedShapley,
                Method::TruncatedMr,
            ],
            seeds: vec![0, 1, 2, 3, 4],
            rounds: 5,
            local_epochs: 10,
            lr: 0.01,
            momentum: 0.5,
            batch_size: 64,
            model: ModelKind::Mlp,
            hidden_units: 64,
            dropout: 0.5,
            samples_per_client: 5000,
            test_samples: 10_000,
            lambda: 0.8,
            truncation_threshold: 0.5,
            synth_classes: 10,
            synth_dim: 20,
            synth_separation: 3.0,
            output_dir: PathBuf::from("results"),
            bank_cap_mb: 2048,
        }
    }
}

impl ExperimentConfig {
    /// Parse the flat `key = value` format (`#` comments). Unknown keys are
    /// rejected. `FEDCE_OUTPUT_DIR` and `FEDCE_BANK_CAP_MB` override the
    /// corresponding fields after parsing.
    pub fn from_text(text: &str) -> Result<Self, BenchError> {
        let mut cfg = ExperimentConfig::default();
        let bad = |line: usize, msg: String| BenchError::Config(format!("line {line}: {msg}"));

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| bad(line_no, format!("expected `key = value`, found {line:?}")))?;
            let key = key.trim();
            let value = value.trim();
            let parse_err =
                |what: &str| bad(line_no, format!("invalid {what} value {value:?} for {key}"));

            match key {
                "dataset" => {
                    cfg.dataset = match value {
                        "mnist" => DatasetKind::Mnist,
                        "synthetic" => DatasetKind::Synthetic,
                        "game-file" => DatasetKind::GameFile,
                        _ => return Err(parse_err("dataset")),
                    }
                }
                "mnist_dir" => cfg.mnist_dir = Some(PathBuf::from(value)),
                "game_file" => cfg.game_file = Some(PathBuf::from(value)),
                "num_clients" => {
                    cfg.num_clients = value.parse().map_err(|_| parse_err("integer"))?
                }
                "methods" => {
                    cfg.methods = value
                        .split(',')
                        .map(|m| Method::from_str(m.trim()))
                        .collect::<Result<_, _>>()
                        .map_err(|e| bad(line_no, e))?;
                }
                "seeds" => {
                    cfg.seeds = value
                        .split(',')
                        .map(|s| s.trim().parse::<u64>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| parse_err("seed list"))?;
                }
                "rounds" => cfg.rounds = value.parse().map_err(|_| parse_err("integer"))?,
                "local_epochs" => {
                    cfg.local_epochs = value.parse().map_err(|_| parse_err("integer"))?
                }
                "lr" => cfg.lr = value.parse().map_err(|_| parse_err("number"))?,
                "momentum" => cfg.momentum = value.parse().map_err(|_| parse_err("number"))?,
                "batch_size" => cfg.batch_size = value.parse().map_err(|_| parse_err("integer"))?,
                "model" => {
                    cfg.model = match value {
                        "mlp" => ModelKind::Mlp,
                        "logistic" => ModelKind::Logistic,
                        _ => return Err(parse_err("model")),
                    }
                }
                "hidden_units" => {
                    cfg.hidden_units = value.parse().map_err(|_| parse_err("integer"))?
                }
                "dropout" => cfg.dropout = value.parse().map_err(|_| parse_err("number"))?,
                "samples_per_client" => {
                    cfg.samples_per_client = value.parse().map_err(|_| parse_err("integer"))?
                }
                "test_samples" => {
                    cfg.test_samples = value.parse().map_err(|_| parse_err("integer"))?
                }
                "lambda" => cfg.lambda = value.parse().map_err(|_| parse_err("number"))?,
                "truncation_threshold" => {
                    cfg.truncation_threshold = value.parse().map_err(|_| parse_err("number"))?
                }
                "synth_classes" => {
                    cfg.synth_classes = value.parse().map_err(|_| parse_err("integer"))?
                }
                "synth_dim" => cfg.synth_dim = value.parse().map_err(|_| parse_err("integer"))?,
                "synth_separation" => {
                    cfg.synth_separation = value.parse().map_err(|_| parse_err("number"))?
                }
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "bank_cap_mb" => {
                    cfg.bank_cap_mb = value.parse().map_err(|_| parse_err("integer"))?
                }
                other => {
                    return Err(bad(line_no, format!("unknown key {other:?}")));
                }
            }
        }

        cfg.apply_env_overrides();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }

    fn apply_env_overrides(&mut self) {
        if let Ok(dir) = std::env::var("FEDCE_OUTPUT_DIR") {
            self.output_dir = PathBuf::from(dir);
        }
        if let Ok(cap) = std::env::var("FEDCE_BANK_CAP_MB") {
            if let Ok(mb) = cap.parse() {
                self.bank_cap_mb = mb;
            }
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let err = |msg: &str| Err(BenchError::Config(msg.to_string()));
        if self.methods.is_empty() {
            return err("methods must be nonempty");
        }
        if self.seeds.is_empty() {
            return err("seeds must be nonempty");
        }
        match self.dataset {
            DatasetKind::GameFile => {
                if self.game_file.is_none() {
                    return err("dataset game-file requires game_file = <path>");
                }
            }
            _ => {
                if !(2..=16).contains(&self.num_clients) {
                    return err("num_clients must be in 2..=16");
                }
                if self.rounds == 0 {
                    return err("rounds must be at least 1");
                }
            }
        }
        Ok(())
    }

    /// Canonical re-serialization, written next to the results for
    /// provenance.
    pub fn canonical_text(&self) -> String {
        let dataset = match self.dataset {
            DatasetKind::Mnist => "mnist",
            DatasetKind::Synthetic => "synthetic",
            DatasetKind::GameFile => "game-file",
        };
        let model = match self.model {
            ModelKind::Mlp => "mlp",
            ModelKind::Logistic => "logistic",
        };
        let methods: Vec<&str> = self.methods.iter().map(|m| m.name()).collect();
        let seeds: Vec<String> = self.seeds.iter().map(|s| s.to_string()).collect();
        let mut out = String::new();
        out.push_str(&format!("dataset = {dataset}\n"));
        if let Some(dir) = &self.mnist_dir {
            out.push_str(&format!("mnist_dir = {}\n", dir.display()));
        }
        if let Some(path) = &self.game_file {
            out.push_str(&format!("game_file = {}\n", path.display()));
        }
        out.push_str(&format!("num_clients = {}\n", self.num_clients));
        out.push_str(&format!("methods = {}\n", methods.join(",")));
        out.push_str(&format!("seeds = {}\n", seeds.join(",")));
        out.push_str(&format!("rounds = {}\n", self.rounds));
        out.push_str(&format!("local_epochs = {}\n", self.local_epochs));
        out.push_str(&format!("lr = {}\n", self.lr));
        out.push_str(&format!("momentum = {}\n", self.momentum));
        out.push_str(&format!("batch_size = {}\n", self.batch_size));
        out.push_str(&format!("model = {model}\n"));
        out.push_str(&format!("hidden_units = {}\n", self.hidden_units));
        out.push_str(&format!("dropout = {}\n", self.dropout));
        out.push_str(&format!(
            "samples_per_client = {}\n",
            self.samples_per_client
        ));
        out.push_str(&format!("test_samples = {}\n", self.test_samples));
        out.push_str(&format!("lambda = {}\n", self.lambda));
        out.push_str(&format!(
            "truncation_threshold = {}\n",
            self.truncation_threshold
        ));
        out.push_str(&format!("synth_classes = {}\n", self.synth_classes));
        out.push_str(&format!("synth_dim = {}\n", self.synth_dim));
        out.push_str(&format!("synth_separation = {}\n", self.synth_separation));
        out.push_str(&format!("output_dir = {}\n", self.output_dir.display()));
        out.push_str(&format!("bank_cap_mb = {}\n", self.bank_cap_mb));
        out
    }
}
