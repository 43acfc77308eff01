use crate::error::{Error, Result};
use crate::mdp::{Action, State, TransitionModel};

use super::DeterministicPolicy;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Optimal average reward per slot.
    pub gain: f64,
    /// Relative values, zero at the reference state.
    pub bias: Vec<f64>,
    pub policy: DeterministicPolicy,
    pub iterations: usize,
    /// Span of the last Bellman difference.
    pub residual: f64,
}

/// Relative value iteration with the default reference state (empty queue)
/// and stopping rule.
pub fn solve_exact(model: &TransitionModel) -> Result<SolveResult> {
    relative_value_iteration(model, State(0), DEFAULT_TOL, DEFAULT_MAX_ITER)
}

/// Relative value iteration for the average-reward criterion.
///
/// Each sweep applies the Bellman operator `(Th)(s) = max_a [R(s,a) + P(·|s,a)·h]`
/// and subtracts `(Th)(ref_state)`, so `h(ref_state)` stays pinned at zero and
/// the subtracted scalar converges to the optimal gain. Iteration stops when
/// the span of `Th - h` drops to `tol`.
///
/// Every recurrent class of this queue contains a self-loop (its smallest
/// state must serve nothing), so the iteration is aperiodic and converges.
pub fn relative_value_iteration(
    model: &TransitionModel,
    ref_state: State,
    tol: f64,
    max_iter: usize,
) -> Result<SolveResult> {
    let ns = model.num_states();
    if ref_state.0 >= ns {
        return Err(Error::Invalid(format!("reference state {} outside 0..={}", ref_state.0, ns - 1)));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }

    let mut h = vec![0.0; ns];
    let mut next = vec![0.0; ns];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        for (s, slot) in next.iter_mut().enumerate() {
            *slot = model
                .feasible(State(s))
                .iter()
                .map(|a| q_value(model, &h, s, a))
                .fold(f64::NEG_INFINITY, f64::max);
        }
        let gain = next[ref_state.0];
        let (lo, hi) = h
            .iter()
            .zip(&next)
            .map(|(old, new)| new - old)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)));
        residual = hi - lo;
        for (hs, &ns_) in h.iter_mut().zip(&next) {
            *hs = ns_ - gain;
        }
        if residual <= tol {
            let policy = greedy_policy(model, &h);
            return Ok(SolveResult { gain, bias: h, policy, iterations: it, residual });
        }
    }
    Err(Error::NoConvergence { iterations: max_iter, residual })
}

#[inline]
fn q_value(model: &TransitionModel, h: &[f64], s: usize, a: Action) -> f64 {
    let row = model.row_unchecked(s, a.0);
    model.reward_at(s, a.0) + row.iter().zip(h).map(|(p, v)| p * v).sum::<f64>()
}

/// Greedy policy with respect to `h`; near-ties go to the smaller action.
fn greedy_policy(model: &TransitionModel, h: &[f64]) -> DeterministicPolicy {
    let actions = (0..model.num_states())
        .map(|s| {
            let mut best = None::<(Action, f64)>;
            for a in model.feasible(State(s)).iter() {
                let v = q_value(model, h, s, a);
                match best {
                    Some((_, bv)) if v <= bv + 1e-12 * (1.0 + bv.abs()) => {}
                    _ => best = Some((a, v)),
                }
            }
            best.expect("feasible sets are never empty").0
        })
        .collect();
    DeterministicPolicy::new_unchecked(actions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{build_transition_model, feasible_actions, QueueParams};
    use crate::solver::evaluate_policy;

    fn solve(p: QueueParams) -> SolveResult {
        solve_exact(&build_transition_model(&p).unwrap()).unwrap()
    }

    #[test]
    fn wide_instance_gain() {
        let r = solve(QueueParams::new(12, 5, 5, 0.4, 1.0));
        assert!((r.gain - -7.64).abs() <= 0.1, "gain {}", r.gain);
        assert!(r.residual <= DEFAULT_TOL);
    }

    #[test]
    fn base_instance_gain_frozen() {
        // independent numpy value-iteration oracle: -3501/475
        let r = solve(QueueParams::new(10, 5, 4, 0.4, 1.0));
        assert!((r.gain - -3501.0 / 475.0).abs() < 1e-9, "gain {}", r.gain);
        let acts: Vec<usize> = r.policy.actions().iter().map(|a| a.0).collect();
        assert_eq!(acts, vec![0, 1, 2, 2, 2, 2, 3, 2, 3, 4, 4]);
    }

    #[test]
    fn forced_policy_closed_form() {
        let p = QueueParams::new(3, 3, 3, 0.4, 1.0);
        let r = solve(p);
        assert!((r.gain - -(1.0 + 9.0 * 0.4)).abs() < 1e-9);
        assert_eq!(r.policy.to_string(), "0;1;2;3");
        assert_eq!(r.bias[0], 0.0);
    }

    #[test]
    fn gain_matches_exhaustive_search_over_all_policies() {
        // every deterministic feasible policy, monotone or not
        for lambda in [0.0, 0.3, 1.0, 4.0] {
            let p = QueueParams::new(6, 3, 3, 0.5, lambda);
            let model = build_transition_model(&p).unwrap();
            let sets: Vec<_> = p.states().map(|s| feasible_actions(&p, s)).collect();
            let mut best = f64::NEG_INFINITY;
            let mut idx = vec![0usize; sets.len()];
            loop {
                let acts: Vec<Action> = idx.iter().zip(&sets).map(|(&i, set)| set.nth(i)).collect();
                let pi = DeterministicPolicy::new(&p, acts).unwrap();
                best = best.max(evaluate_policy(&model, &pi).unwrap().gain);
                let mut k = 0;
                while k < idx.len() {
                    idx[k] += 1;
                    if idx[k] < sets[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
            let r = solve_exact(&model).unwrap();
            assert!((r.gain - best).abs() < 1e-9, "lambda {lambda}: {} vs {best}", r.gain);
        }
    }

    #[test]
    fn gain_consistent_with_own_policy_evaluation() {
        for (b, m, c) in [(10, 5, 4), (12, 5, 5), (6, 3, 3)] {
            for alpha in [0.3, 0.5, 0.7] {
                let model = build_transition_model(&QueueParams::new(b, m, c, alpha, 1.0)).unwrap();
                let r = solve_exact(&model).unwrap();
                let e = evaluate_policy(&model, &r.policy).unwrap();
                assert!((e.gain - r.gain).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn reports_non_convergence() {
        let model = build_transition_model(&QueueParams::new(10, 5, 4, 0.4, 1.0)).unwrap();
        match relative_value_iteration(&model, State(0), 1e-10, 3) {
            Err(Error::NoConvergence { iterations, residual }) => {
                assert_eq!(iterations, 3);
                assert!(residual > 1e-10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let model = build_transition_model(&QueueParams::new(10, 5, 4, 0.4, 1.0)).unwrap();
        assert!(relative_value_iteration(&model, State(11), 1e-10, 10).is_err());
        assert!(relative_value_iteration(&model, State(0), 0.0, 10).is_err());
    }
}
