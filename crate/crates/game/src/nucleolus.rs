use std::collections::BTreeSet;

use fedce_lp::{LpProblem, LpStatus, Simplex};

use crate::{caps, Coalition, Game, GameError, PayoffVector};

/// Constraints within this slack of the level optimum are treated as tight.
const TIGHT_TOL: f64 = 1e-7;
/// Pivot threshold for the rank test on the settled equality system.
const RANK_TOL: f64 = 1e-9;

/// Nucleolus by the standard lexicographic LP sequence: solve the least-core
/// LP, freeze the constraints that are tight across the whole optimal face as
/// equalities, re-minimize the next-largest deficit, and repeat until the
/// settled equalities pin the payoff down uniquely.
///
/// A constraint tight at the returned vertex is not necessarily tight at
/// every optimum; each candidate is verified by maximizing its slack over the
/// optimal face before it is frozen.
pub fn nucleolus(game: &Game, simplex: &Simplex) -> Result<PayoffVector, GameError> {
    nucleolus_with_cap(game, simplex, caps::NUCLEOLUS)
}

pub fn nucleolus_with_cap(
    game: &Game,
    simplex: &Simplex,
    cap: usize,
) -> Result<PayoffVector, GameError> {
    let n = game.n();
    if n > cap {
        return Err(GameError::PlayerCountExceeded { n, cap });
    }
    if n == 1 {
        return Ok(PayoffVector::new(vec![game.grand_value()]));
    }

    let mut unsettled: BTreeSet<u32> = (1..(1u32 << n) - 1).collect();
    // Settled coalitions with their frozen payoff totals v(S) - eps_level.
    let mut settled: Vec<(u32, f64)> = Vec::new();

    for level in 1..=(1usize << n) {
        let lp = build_level_lp(game, &settled, &unsettled, None, None);
        let solution = simplex.solve(&lp)?;
        if solution.status != LpStatus::Optimal {
            return Err(GameError::DegenerateTightSet {
                level,
                reason: format!("level LP terminated with {:?}", solution.status),
            });
        }
        let x = &solution.x[..n];
        let eps = solution.x[n];

        let candidates: Vec<u32> = unsettled
            .iter()
            .copied()
            .filter(|&mask| {
                let coalition = Coalition::from_mask(n, mask);
                let total: f64 = coalition.members().map(|i| x[i]).sum();
                (total + eps - game.v(coalition)).abs() <= TIGHT_TOL
            })
            .collect();

        // Keep only candidates whose slack stays zero over the whole optimal
        // face: maximize the candidate's coalition sum with epsilon pinned at
        // the level optimum.
        let mut tight: Vec<u32> = Vec::new();
        for &mask in &candidates {
            let coalition = Coalition::from_mask(n, mask);
            let probe = build_level_lp(game, &settled, &unsettled, Some(eps), Some(mask));
            let probe_solution = simplex.solve(&probe)?;
            match probe_solution.status {
                LpStatus::Optimal => {
                    let best_sum = -probe_solution.objective_value;
                    let max_slack = best_sum + eps - game.v(coalition);
                    if max_slack <= TIGHT_TOL {
                        tight.push(mask);
                    }
                }
                // Slack unbounded above: certainly not tight everywhere.
                LpStatus::Unbounded => {}
                LpStatus::Infeasible => {
                    return Err(GameError::DegenerateTightSet {
                        level,
                        reason: "optimal face probe reported infeasible".into(),
                    });
                }
            }
        }
        if tight.is_empty() {
            return Err(GameError::DegenerateTightSet {
                level,
                reason: "no unsettled constraint is tight across the level optimum".into(),
            });
        }
        for &mask in &tight {
            unsettled.remove(&mask);
            settled.push((mask, game.v(Coalition::from_mask(n, mask)) - eps));
        }

        if settled_rank(n, &settled) == n {
            return Ok(PayoffVector::new(x.to_vec()));
        }
        if unsettled.is_empty() {
            return Err(GameError::DegenerateTightSet {
                level,
                reason: "all constraints settled but the payoff is underdetermined".into(),
            });
        }
    }
    Err(GameError::DegenerateTightSet {
        level: 1 << n,
        reason: "lexicographic sequence did not terminate".into(),
    })
}

/// Level LP over variables `(x, epsilon)`: efficiency, the settled
/// equalities, and `x(S) + epsilon >= v(S)` for the unsettled coalitions.
///
/// With `fix_epsilon` the LP is restricted to the optimal face of the level,
/// and `maximize_mask` switches the objective from `min epsilon` to
/// maximizing that coalition's payoff sum (as a minimization of its
/// negation), which probes whether the coalition's constraint can go slack.
fn build_level_lp(
    game: &Game,
    settled: &[(u32, f64)],
    unsettled: &BTreeSet<u32>,
    fix_epsilon: Option<f64>,
    maximize_mask: Option<u32>,
) -> LpProblem {
    let n = game.n();
    let mut objective = vec![0.0; n + 1];
    match maximize_mask {
        None => objective[n] = 1.0,
        Some(mask) => {
            for i in Coalition::from_mask(n, mask).members() {
                objective[i] = -1.0;
            }
        }
    }
    let mut lp = LpProblem::minimize(objective);

    let mut efficiency = vec![1.0; n + 1];
    efficiency[n] = 0.0;
    lp.add_eq(efficiency, game.grand_value());
    for &(mask, target) in settled {
        let mut coeffs = vec![0.0; n + 1];
        for i in Coalition::from_mask(n, mask).members() {
            coeffs[i] = 1.0;
        }
        lp.add_eq(coeffs, target);
    }
    for &mask in unsettled {
        let coalition = Coalition::from_mask(n, mask);
        let mut coeffs = vec![0.0; n + 1];
        for i in coalition.members() {
            coeffs[i] = 1.0;
        }
        coeffs[n] = 1.0;
        lp.add_ge(coeffs, game.v(coalition));
    }
    if let Some(eps) = fix_epsilon {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        lp.add_eq(coeffs, eps);
    }
    lp
}

/// Rank of the settled equality system (efficiency row plus one indicator
/// row per settled coalition), by Gaussian elimination.
fn settled_rank(n: usize, settled: &[(u32, f64)]) -> usize {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(settled.len() + 1);
    rows.push(vec![1.0; n]);
    for &(mask, _) in settled {
        let mut row = vec![0.0; n];
        for i in Coalition::from_mask(n, mask).members() {
            row[i] = 1.0;
        }
        rows.push(row);
    }

    let mut rank = 0;
    for col in 0..n {
        let pivot = (rank..rows.len())
            .max_by(|&a, &b| rows[a][col].abs().partial_cmp(&rows[b][col].abs()).unwrap());
        let Some(pivot) = pivot else { break };
        if rows[pivot][col].abs() < RANK_TOL {
            continue;
        }
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            let factor = row[col] / pivot_row[col];
            if factor != 0.0 {
                for (cell, p) in row.iter_mut().zip(&pivot_row) {
                    *cell -= factor * p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}
