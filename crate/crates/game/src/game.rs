use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::Coalition;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("{n} players exceeds the cap of {cap} for this solver")]
    PlayerCountExceeded { n: usize, cap: usize },
    #[error("least-core LP reported infeasible; this signals a solver bug for bounded games")]
    LpInfeasible,
    #[error("nucleolus tight-set identification failed at level {level}: {reason}")]
    DegenerateTightSet { level: usize, reason: String },
    #[error(transparent)]
    Lp(#[from] fedce_lp::LpError),
}

/// Memoizing wrapper around a characteristic function.
///
/// Evaluations may be issued from multiple threads; the cache keeps the first
/// value written for a coalition, so a deterministic evaluator always yields
/// identical repeat lookups. The number of underlying evaluator invocations
/// is observable for complexity assertions.
pub struct UtilityOracle {
    evaluator: Box<dyn Fn(Coalition) -> f64 + Send + Sync>,
    cache: Mutex<HashMap<u32, f64>>,
    calls: AtomicU64,
}

impl UtilityOracle {
    pub fn new(evaluator: impl Fn(Coalition) -> f64 + Send + Sync + 'static) -> Self {
        UtilityOracle {
            evaluator: Box::new(evaluator),
            cache: Mutex::new(HashMap::new()),
            calls: AtomicU64::new(0),
        }
    }

    pub fn evaluate(&self, coalition: Coalition) -> f64 {
        if let Some(&v) = self.cache.lock().unwrap().get(&coalition.mask()) {
            return v;
        }
        // Evaluate outside the lock so concurrent callers are not serialized
        // behind expensive evaluators; first write wins.
        self.calls.fetch_add(1, Ordering::Relaxed);
        let value = (self.evaluator)(coalition);
        *self
            .cache
            .lock()
            .unwrap()
            .entry(coalition.mask())
            .or_insert(value)
    }

    /// Number of evaluator invocations so far (cache misses).
    pub fn evaluations(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

/// A coalitional game: a player count and a memoized utility.
///
/// Construction normalizes the characteristic function so `v(empty) == 0`,
/// subtracting whatever the raw evaluator returns for the empty coalition.
pub struct Game {
    n: usize,
    oracle: UtilityOracle,
}

impl Game {
    pub fn new(n: usize, evaluator: impl Fn(Coalition) -> f64 + Send + Sync + 'static) -> Self {
        assert!(
            (1..=crate::caps::MAX_PLAYERS).contains(&n),
            "player count {} outside 1..={}",
            n,
            crate::caps::MAX_PLAYERS
        );
        let base = evaluator(Coalition::empty(n));
        let oracle = UtilityOracle::new(move |c: Coalition| {
            if c.is_empty() {
                0.0
            } else {
                evaluator(c) - base
            }
        });
        // The baseline probe above counts as the empty coalition's
        // evaluation; record it and pin the cache entry.
        oracle.calls.store(1, Ordering::Relaxed);
        oracle.cache.lock().unwrap().insert(0, 0.0);
        Game { n, oracle }
    }

    /// Explicit game from `(mask, utility)` entries; missing subsets are 0.
    pub fn from_table(n: usize, entries: &[(u32, f64)]) -> Self {
        let mut table = vec![0.0; 1usize << n];
        for &(mask, v) in entries {
            table[mask as usize] = v;
        }
        Game::new(n, move |c: Coalition| table[c.mask() as usize])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn v(&self, coalition: Coalition) -> f64 {
        assert_eq!(
            coalition.player_count(),
            self.n,
            "coalition is over a different player set"
        );
        self.oracle.evaluate(coalition)
    }

    pub fn grand_value(&self) -> f64 {
        self.v(Coalition::grand(self.n))
    }

    pub fn oracle(&self) -> &UtilityOracle {
        &self.oracle
    }
}
