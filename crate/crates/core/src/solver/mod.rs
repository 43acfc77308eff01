//! Model-based ground truth for the queue MDP.

mod enumerate;
mod eval;
mod frontier;
mod hop;
mod rvi;
mod sweep;

use std::fmt;

pub use enumerate::{count_monotone_policies, enumerate_monotone_policies};
pub use eval::{evaluate_policy, policy_chain, stationary_distribution, PolicyEval};
pub use frontier::{constraint_solve, frontier_gap, tradeoff_frontier, tradeoff_points, Mixture, TradeoffPoint};
pub use hop::h_operator;
pub use rvi::{relative_value_iteration, solve_exact, SolveResult, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use sweep::{sweep_lambda, SweepPoint};

use crate::error::{Error, Result};
use crate::mdp::{feasible_actions, Action, QueueParams, State};

/// One feasible action per state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicPolicy {
    actions: Vec<Action>,
}

impl DeterministicPolicy {
    pub fn new(p: &QueueParams, actions: Vec<Action>) -> Result<Self> {
        if actions.len() != p.num_states() {
            return Err(Error::PolicyLength { expected: p.num_states(), got: actions.len() });
        }
        for (q, &a) in actions.iter().enumerate() {
            if !feasible_actions(p, State(q)).contains(a) {
                return Err(Error::InfeasibleAction { state: State(q), action: a });
            }
        }
        Ok(Self { actions })
    }

    pub fn from_indices(p: &QueueParams, actions: &[usize]) -> Result<Self> {
        Self::new(p, actions.iter().copied().map(Action).collect())
    }

    pub(crate) fn new_unchecked(actions: Vec<Action>) -> Self {
        Self { actions }
    }

    pub fn action(&self, s: State) -> Action {
        self.actions[s.0]
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// `c(q) <= c(q')` whenever `q <= q'`.
    pub fn is_monotone(&self) -> bool {
        self.actions.windows(2).all(|w| w[0] <= w[1])
    }

    /// Feasibility check against another parameter set (e.g. after changing alpha).
    pub fn is_feasible_for(&self, p: &QueueParams) -> bool {
        self.actions.len() == p.num_states()
            && self.actions.iter().enumerate().all(|(q, &a)| feasible_actions(p, State(q)).contains(a))
    }
}

/// Semicolon-joined action indices, e.g. `0;1;2;2`.
impl fmt::Display for DeterministicPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.actions.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}", a.0)?;
        }
        Ok(())
    }
}
