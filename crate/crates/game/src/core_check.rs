use crate::{caps, Coalition, Game, GameError, PayoffVector};

/// Tolerance on the efficiency equation when checking membership.
const EFFICIENCY_TOL: f64 = 1e-6;

/// Result of an epsilon-core membership test.
#[derive(Debug, Clone)]
pub struct CoreCheck {
    pub is_member: bool,
    /// Why membership failed, if it did.
    pub failure: Option<CoreViolation>,
}

#[derive(Debug, Clone)]
pub enum CoreViolation {
    /// The payoff does not distribute `v(N)`.
    NotEfficient { total: f64, grand_value: f64 },
    /// The coalition with the largest deficit beyond epsilon.
    Blocking { coalition: Coalition, deficit: f64 },
}

/// Check whether `x` lies in the epsilon-core: efficiency plus
/// `x(S) >= v(S) - epsilon` for every nonempty proper coalition. The grand
/// coalition is covered by the efficiency equation rather than the epsilon
/// constraint, so negative epsilon values (non-empty cores) behave sensibly.
/// On failure the worst violating coalition (largest deficit) is reported.
pub fn core_membership(
    game: &Game,
    x: &PayoffVector,
    epsilon: f64,
) -> Result<CoreCheck, GameError> {
    let n = game.n();
    if n > caps::EXACT_ENUMERATION {
        return Err(GameError::PlayerCountExceeded {
            n,
            cap: caps::EXACT_ENUMERATION,
        });
    }
    assert_eq!(x.len(), n, "payoff length does not match player count");

    let grand_value = game.grand_value();
    let total = x.sum();
    if (total - grand_value).abs() > EFFICIENCY_TOL {
        return Ok(CoreCheck {
            is_member: false,
            failure: Some(CoreViolation::NotEfficient { total, grand_value }),
        });
    }
    if n == 1 {
        return Ok(CoreCheck {
            is_member: true,
            failure: None,
        });
    }

    let mut worst: Option<(Coalition, f64)> = None;
    for mask in 1..(1u32 << n) - 1 {
        let coalition = Coalition::from_mask(n, mask);
        let deficit = game.v(coalition) - x.coalition_sum(coalition);
        if deficit > epsilon + EFFICIENCY_TOL {
            match worst {
                Some((_, d)) if d >= deficit => {}
                _ => worst = Some((coalition, deficit)),
            }
        }
    }
    match worst {
        None => Ok(CoreCheck {
            is_member: true,
            failure: None,
        }),
        Some((coalition, deficit)) => Ok(CoreCheck {
            is_member: false,
            failure: Some(CoreViolation::Blocking { coalition, deficit }),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn additive_allocation_is_in_core() {
        let w = [0.4, 0.6, 1.0];
        let g = Game::new(3, move |c: Coalition| c.members().map(|i| w[i]).sum());
        let check = core_membership(&g, &PayoffVector::new(w.to_vec()), 0.0).unwrap();
        assert!(check.is_member);
    }

    #[test]
    fn glove_monopolist_point_is_in_core() {
        let g = Game::new(3, |c: Coalition| {
            if c.contains(0) && (c.contains(1) || c.contains(2)) {
                1.0
            } else {
                0.0
            }
        });
        let check = core_membership(&g, &PayoffVector::new(vec![1.0, 0.0, 0.0]), 0.0).unwrap();
        assert!(check.is_member);
    }

    #[test]
    fn majority_game_has_empty_core() {
        let g = Game::new(3, |c: Coalition| if c.size() >= 2 { 1.0 } else { 0.0 });
        let x = PayoffVector::new(vec![1.0 / 3.0; 3]);
        let check = core_membership(&g, &x, 0.0).unwrap();
        assert!(!check.is_member);
        match check.failure {
            Some(CoreViolation::Blocking { coalition, deficit }) => {
                assert_eq!(coalition.size(), 2);
                assert!((deficit - 1.0 / 3.0).abs() < 1e-9);
            }
            other => panic!("expected a blocking pair, got {:?}", other),
        }
    }

    #[test]
    fn inefficient_vector_rejected() {
        let g = Game::new(2, |c: Coalition| c.size() as f64);
        let check = core_membership(&g, &PayoffVector::new(vec![0.5, 0.5]), 0.0).unwrap();
        assert!(!check.is_member);
        assert!(matches!(
            check.failure,
            Some(CoreViolation::NotEfficient { .. })
        ));
    }

    #[test]
    fn epsilon_relaxation_admits_majority_split() {
        let g = Game::new(3, |c: Coalition| if c.size() >= 2 { 1.0 } else { 0.0 });
        let x = PayoffVector::new(vec![1.0 / 3.0; 3]);
        let check = core_membership(&g, &x, 1.0 / 3.0).unwrap();
        assert!(check.is_member);
    }
}
