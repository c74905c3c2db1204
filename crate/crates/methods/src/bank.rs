use fedce_game::Coalition;
use fedce_learn::ParamVector;
use fedce_sim::RoundLog;

use crate::CeError;

/// Memory budget for pseudo-model storage. The default mirrors the paper's
/// reported multi-round crash behavior: exceeding the cap fails fast instead
/// of thrashing.
#[derive(Debug, Clone, Copy)]
pub struct BankBudget {
    pub cap_bytes: usize,
}

impl Default for BankBudget {
    fn default() -> Self {
        // 2 GiB
        BankBudget {
            cap_bytes: 2 * 1024 * 1024 * 1024,
        }
    }
}

impl BankBudget {
    pub fn from_megabytes(mb: usize) -> Self {
        BankBudget {
            cap_bytes: mb * 1024 * 1024,
        }
    }
}

/// One pseudo-model per coalition, indexed by mask. Entry 0 (the empty
/// coalition) is the shared initialization and never moves; the grand
/// coalition's entry tracks the true global model exactly.
pub struct PseudoModelBank {
    n: usize,
    /// Client ids in bit order: bit `i` of a mask refers to `ids[i]`.
    ids: Vec<usize>,
    models: Vec<ParamVector>,
    round: usize,
}

impl PseudoModelBank {
    /// Build a bank for the clients and initialization of the first round
    /// log. Fails if `2^n` parameter vectors would exceed the budget.
    pub fn for_logs(first: &RoundLog, budget: BankBudget) -> Result<Self, CeError> {
        let ids: Vec<usize> = first.sizes.keys().copied().collect();
        let n = ids.len();
        let init = &first.global_before;

        let entries = 1usize << n;
        let needed_bytes = entries.saturating_mul(init.len()).saturating_mul(8);
        if needed_bytes > budget.cap_bytes {
            return Err(CeError::MemoryBudgetExceeded {
                needed_bytes,
                cap_bytes: budget.cap_bytes,
            });
        }
        Ok(PseudoModelBank {
            n,
            ids,
            models: vec![init.clone(); entries],
            round: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn model(&self, coalition: Coalition) -> &ParamVector {
        &self.models[coalition.mask() as usize]
    }

    /// Apply one round: every nonempty coalition's model advances by the
    /// size-weighted combination of its own members' deltas,
    /// `models[S] += sum_{i in S} (n_i / sum_{j in S} n_j) * delta_i`.
    pub fn update(&mut self, log: &RoundLog) -> Result<(), CeError> {
        if log.t != self.round + 1 {
            return Err(CeError::RoundOrderViolation {
                expected: self.round + 1,
                found: log.t,
            });
        }
        let deltas: Vec<&ParamVector> = self
            .ids
            .iter()
            .map(|id| {
                log.local_updates
                    .get(id)
                    .expect("log is over the bank's client set")
            })
            .collect();
        let sizes: Vec<f64> = self.ids.iter().map(|id| log.sizes[id] as f64).collect();

        for mask in 1..self.models.len() {
            let mut total = 0.0;
            for (i, &size) in sizes.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    total += size;
                }
            }
            let model = &mut self.models[mask];
            for (i, delta) in deltas.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    model.add_scaled(delta, sizes[i] / total);
                }
            }
        }
        self.round = log.t;
        Ok(())
    }
}
