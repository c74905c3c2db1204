use std::collections::{BTreeMap, BTreeSet};

use fedce_lp::{LpProblem, LpStatus, Simplex};

use crate::{caps, Coalition, CoalitionSampler, Game, GameError, PayoffVector};

/// Slack below which a constraint counts as tight.
const TIGHT_TOL: f64 = 1e-7;

/// Solution of the least-core LP.
#[derive(Debug, Clone)]
pub struct LeastCoreSolution {
    pub payoff: PayoffVector,
    pub epsilon_star: f64,
    /// Deficit `v(S) - x(S)` for every coalition that was constrained.
    pub deficits: BTreeMap<Coalition, f64>,
    /// `epsilon_star <= 0`, i.e. the core itself is non-empty.
    pub core_nonempty: bool,
    /// Whether every payoff entry is non-negative (reported, not enforced).
    pub all_nonnegative: bool,
}

/// Compute the least core: minimize epsilon subject to efficiency and
/// `x(S) + epsilon >= v(S)` for every nonempty proper coalition. The
/// returned payoff is the first optimal vertex found by the deterministic
/// pivot order of `simplex`.
pub fn least_core(game: &Game, simplex: &Simplex) -> Result<LeastCoreSolution, GameError> {
    least_core_with_cap(game, simplex, caps::LEAST_CORE)
}

pub fn least_core_with_cap(
    game: &Game,
    simplex: &Simplex,
    cap: usize,
) -> Result<LeastCoreSolution, GameError> {
    let n = game.n();
    if n > cap {
        return Err(GameError::PlayerCountExceeded { n, cap });
    }
    if n == 1 {
        // No proper nonempty coalition constrains epsilon.
        let v = game.grand_value();
        return Ok(LeastCoreSolution {
            payoff: PayoffVector::new(vec![v]),
            epsilon_star: 0.0,
            deficits: BTreeMap::new(),
            core_nonempty: true,
            all_nonnegative: v >= -TIGHT_TOL,
        });
    }
    let masks: Vec<u32> = (1..(1u32 << n) - 1).collect();
    solve_constrained(game, simplex, &masks, None)
}

/// Shared LP assembly: variables are `(x_0..x_{n-1}, epsilon)`; constraint 0
/// is efficiency, followed by one row per mask in the given order.
fn solve_constrained(
    game: &Game,
    simplex: &Simplex,
    masks: &[u32],
    epsilon_lower: Option<f64>,
) -> Result<LeastCoreSolution, GameError> {
    let n = game.n();
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LpProblem::minimize(objective);

    let mut efficiency = vec![1.0; n + 1];
    efficiency[n] = 0.0;
    lp.add_eq(efficiency, game.grand_value());

    for &mask in masks {
        let coalition = Coalition::from_mask(n, mask);
        let mut coeffs = vec![0.0; n + 1];
        for i in coalition.members() {
            coeffs[i] = 1.0;
        }
        coeffs[n] = 1.0;
        lp.add_ge(coeffs, game.v(coalition));
    }
    if let Some(lo) = epsilon_lower {
        lp.set_lower_bound(n, lo);
    }

    let solution = simplex.solve(&lp)?;
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(GameError::LpInfeasible),
        LpStatus::Unbounded => {
            return Err(GameError::DegenerateTightSet {
                level: 0,
                reason: "least-core LP unbounded; constraint set too sparse".into(),
            })
        }
    }

    let payoff = PayoffVector::new(solution.x[..n].to_vec());
    let epsilon_star = solution.x[n];
    let mut deficits = BTreeMap::new();
    for &mask in masks {
        let coalition = Coalition::from_mask(n, mask);
        deficits.insert(
            coalition,
            game.v(coalition) - payoff.coalition_sum(coalition),
        );
    }
    let all_nonnegative = payoff.iter().all(|x| x >= -TIGHT_TOL);
    Ok(LeastCoreSolution {
        payoff,
        epsilon_star,
        deficits,
        core_nonempty: epsilon_star <= TIGHT_TOL,
        all_nonnegative,
    })
}

/// Parameters of the sampled least core. `e` is the allowed constraint
/// violation, `delta` the tolerated violation probability, `big_delta` the
/// confidence failure probability and `tau` the utility range.
#[derive(Debug, Clone)]
pub struct McLeastCoreParams {
    pub e: f64,
    pub delta: f64,
    pub big_delta: f64,
    pub tau: f64,
    pub sample_count: usize,
}

impl McLeastCoreParams {
    /// Explicit sample count.
    pub fn with_samples(e: f64, delta: f64, big_delta: f64, tau: f64, sample_count: usize) -> Self {
        let p = McLeastCoreParams {
            e,
            delta,
            big_delta,
            tau,
            sample_count,
        };
        p.validate();
        p
    }

    /// Derive the PAC sample count
    /// `ceil(tau^2 (ln n + ln(1/Delta)) / (e^2 delta^2))`.
    pub fn auto(e: f64, delta: f64, big_delta: f64, tau: f64, n: usize) -> Self {
        let needed = (tau * tau * ((n as f64).ln() + (1.0 / big_delta).ln())
            / (e * e * delta * delta))
            .ceil()
            .max(1.0) as usize;
        Self::with_samples(e, delta, big_delta, tau, needed)
    }

    fn validate(&self) {
        assert!(self.e > 0.0, "e must be positive");
        assert!(self.delta > 0.0 && self.delta < 1.0, "delta in (0,1)");
        assert!(
            self.big_delta > 0.0 && self.big_delta < 1.0,
            "Delta in (0,1)"
        );
        assert!(self.tau >= 0.0, "tau must be non-negative");
        assert!(self.sample_count >= 1, "need at least one sample");
    }
}

/// Sampled least core plus its audit.
#[derive(Debug, Clone)]
pub struct McLeastCoreSolution {
    pub solution: LeastCoreSolution,
    /// Fraction of all proper nonempty coalitions violating
    /// `x(S) + epsilon* + e >= v(S)`; audited by full enumeration when the
    /// player count allows it.
    pub violation_fraction: Option<f64>,
    /// Distinct coalitions that made it into the LP.
    pub distinct_samples: usize,
}

/// Least core constrained only by sampled coalitions (uniform over the
/// nonempty proper subsets, deduplicated), plus the efficiency equality.
/// Epsilon is kept bounded below by `-tau`; the exact optimum always
/// satisfies that, so sampling can only lower the objective.
pub fn least_core_monte_carlo(
    game: &Game,
    params: &McLeastCoreParams,
    sampler: &mut CoalitionSampler,
    simplex: &Simplex,
) -> Result<McLeastCoreSolution, GameError> {
    params.validate();
    let n = game.n();
    if n == 1 {
        let solution = least_core(game, simplex)?;
        return Ok(McLeastCoreSolution {
            solution,
            violation_fraction: Some(0.0),
            distinct_samples: 0,
        });
    }

    let mut sampled: BTreeSet<u32> = BTreeSet::new();
    for _ in 0..params.sample_count {
        sampled.insert(sampler.draw().mask());
    }
    let masks: Vec<u32> = sampled.iter().copied().collect();
    let solution = solve_constrained(game, simplex, &masks, Some(-params.tau))?;

    let violation_fraction = if n <= caps::LEAST_CORE {
        let total = (1u64 << n) - 2;
        let mut violated = 0u64;
        for mask in 1..(1u32 << n) - 1 {
            let coalition = Coalition::from_mask(n, mask);
            let lhs = solution.payoff.coalition_sum(coalition) + solution.epsilon_star + params.e;
            if lhs < game.v(coalition) - 1e-12 {
                violated += 1;
            }
        }
        Some(violated as f64 / total as f64)
    } else {
        None
    };

    Ok(McLeastCoreSolution {
        solution,
        violation_fraction,
        distinct_samples: masks.len(),
    })
}
