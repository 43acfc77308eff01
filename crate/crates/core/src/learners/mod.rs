//! Tabular average-reward agents.
//!
//! All three agents share the relative Q-update anchored at a reference
//! state `i`:
//!
//! ```text
//! Q(s,a) <- (1 - g_k) Q(s,a) + g_k (r + max_a' Q(s',a') - max_v Q(i,v) + b_k)
//! ```
//!
//! with `g_k = phi / (k + theta)` driven by the per-pair visit count `k`.
//! Q-greedyUCB adds the confidence bonus `b_k = sigma·sqrt(ln(S·A·k·t/delta)/k)`
//! and acts greedily on the running minimum `Qhat` of each cell; ε-greedy
//! Q-learning uses `b_k = 0`. ARL keeps an explicit average-reward estimate
//! instead of the reference-state anchor.

mod arl;
mod qgreedyucb;
mod qlearning;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{Action, ActionSet, QueueParams, State};
use crate::solver::DeterministicPolicy;
use crate::table::StateActionTable;

pub use arl::ArlAgent;
pub use qgreedyucb::{qgreedyucb_observe, qgreedyucb_select, QGreedyUcbAgent};
pub use qlearning::QLearningAgent;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    /// Exploration scale of the confidence bonus.
    pub sigma: f64,
    /// Confidence parameter inside the log factor.
    pub delta: f64,
    /// Exploration probability of the ε-greedy baselines. Q-greedyUCB ignores it.
    pub epsilon: f64,
    pub phi: f64,
    pub theta: f64,
    /// Reference state whose best Q-value anchors the update.
    pub ref_state: State,
    pub seed: u64,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        Self { sigma: 1.0, delta: 0.01, epsilon: 0.01, phi: 1.0, theta: 1.0, ref_state: State(0), seed: 0 }
    }
}

impl LearnerConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self, p: &QueueParams) -> Result<()> {
        let mut errs = Vec::new();
        if self.sigma.is_nan() || self.sigma <= 0.0 {
            errs.push(format!("sigma must be positive, got {}", self.sigma));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            errs.push(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            errs.push(format!("epsilon must lie in [0, 1], got {}", self.epsilon));
        }
        if self.phi.is_nan() || self.phi <= 0.0 {
            errs.push(format!("phi must be positive, got {}", self.phi));
        }
        if self.theta.is_nan() || self.theta < 0.0 {
            errs.push(format!("theta must be non-negative, got {}", self.theta));
        }
        if self.ref_state.0 > p.buffer_size {
            errs.push(format!("reference state {} exceeds B = {}", self.ref_state.0, p.buffer_size));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(errs.join("; ")))
        }
    }
}

/// Learner state.
#[derive(Debug, Clone, PartialEq)]
pub struct QTables {
    pub q: StateActionTable,
    /// Historical minimum of each Q cell; only Q-greedyUCB keeps one.
    pub qhat: Option<StateActionTable>,
    visits: Vec<u64>,
    /// Number of completed updates.
    pub t: u64,
}

impl QTables {
    pub fn new(p: &QueueParams, with_qhat: bool) -> Self {
        let q = StateActionTable::zeros_for(p);
        let visits = vec![0; p.num_states() * p.num_actions()];
        Self { qhat: with_qhat.then(|| q.clone()), q, visits, t: 0 }
    }

    /// Tables over arbitrary feasible sets, for models other than the queue.
    pub fn from_feasible(feasible: Vec<ActionSet>, num_actions: usize, with_qhat: bool) -> Self {
        let visits = vec![0; feasible.len() * num_actions];
        let q = StateActionTable::filled(feasible, num_actions, 0.0);
        Self { qhat: with_qhat.then(|| q.clone()), q, visits, t: 0 }
    }

    pub fn num_states(&self) -> usize {
        self.q.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.q.num_actions()
    }

    pub fn visits(&self, s: State, a: Action) -> u64 {
        self.visits[s.0 * self.num_actions() + a.0]
    }

    /// Increments `N(s, a)` and returns the new count.
    pub(crate) fn bump(&mut self, s: State, a: Action) -> u64 {
        let i = s.0 * self.num_actions() + a.0;
        self.visits[i] += 1;
        self.visits[i]
    }

    pub fn total_visits(&self) -> u64 {
        self.visits.iter().sum()
    }
}

/// `sigma · sqrt(ln(S·A·k·t / delta) / k)`.
pub fn bonus(sigma: f64, delta: f64, num_states: usize, num_actions: usize, k: u64, t: u64) -> Result<f64> {
    if k == 0 || t == 0 {
        return Err(Error::BonusDomain { k, t });
    }
    let iota = ((num_states * num_actions) as f64 * k as f64 * t as f64 / delta).ln();
    Ok(sigma * (iota.max(0.0) / k as f64).sqrt())
}

/// `phi / (k + theta)`.
pub fn step_size(phi: f64, theta: f64, k: u64) -> f64 {
    phi / (k as f64 + theta)
}

/// Uniformly random maximiser of `table` over the feasible actions of `s`.
/// The generator is only consulted when there is a tie.
pub(crate) fn argmax_random_tie<R: Rng + ?Sized>(table: &StateActionTable, s: State, rng: &mut R) -> Action {
    let set = table.feasible(s);
    let row = table.row(s);
    let mut best = f64::NEG_INFINITY;
    let mut ties = 0usize;
    let mut pick = 0usize;
    for (i, &v) in row.iter().enumerate() {
        if v > best {
            best = v;
            ties = 1;
            pick = i;
        } else if v == best {
            ties += 1;
        }
    }
    if ties > 1 {
        let nth = rng.random_range(0..ties);
        pick = row.iter().enumerate().filter(|&(_, &v)| v == best).nth(nth).expect("tie index in range").0;
    }
    set.nth(pick)
}

/// Relative Q-update shared by all agents that anchor on a reference state.
#[inline]
#[allow(clippy::too_many_arguments)]
pub(crate) fn relative_update(tables: &mut QTables, s: State, a: Action, r: f64, next: State, step: f64, b: f64, ref_state: State) {
    let target = r + tables.q.row_max(next) - tables.q.row_max(ref_state) + b;
    let old = tables.q.get(s, a);
    tables.q.set(s, a, (1.0 - step) * old + step * target);
}

/// Per-state action distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticPolicy {
    num_actions: usize,
    probs: Vec<f64>,
}

impl StochasticPolicy {
    pub fn num_states(&self) -> usize {
        self.probs.len() / self.num_actions
    }

    pub fn prob(&self, s: State, a: Action) -> f64 {
        self.probs[s.0 * self.num_actions + a.0]
    }

    /// Actions with positive probability in `s`, ascending.
    pub fn support(&self, s: State) -> Vec<Action> {
        (0..self.num_actions).map(Action).filter(|&a| self.prob(s, a) > 0.0).collect()
    }

    /// True when every state puts all its mass on the action `pi` picks.
    pub fn matches(&self, pi: &DeterministicPolicy) -> bool {
        self.mismatched_states(pi).is_empty()
    }

    pub fn mismatched_states(&self, pi: &DeterministicPolicy) -> Vec<State> {
        (0..self.num_states())
            .map(State)
            .filter(|&s| self.prob(s, pi.action(s)) != 1.0)
            .collect()
    }
}

/// Uniform over the maximisers of `Q` in each state.
pub fn extract_policy(tables: &QTables) -> StochasticPolicy {
    let na = tables.num_actions();
    let mut probs = vec![0.0; tables.num_states() * na];
    for s in 0..tables.num_states() {
        let best = tables.q.argmax_set(State(s));
        let w = 1.0 / best.len() as f64;
        for a in best {
            probs[s * na + a.0] = w;
        }
    }
    StochasticPolicy { num_actions: na, probs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    QGreedyUcb,
    QLearning,
    Arl,
}

impl AgentKind {
    pub const ALL: [AgentKind; 3] = [AgentKind::QGreedyUcb, AgentKind::QLearning, AgentKind::Arl];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::QGreedyUcb => "qgreedyucb",
            AgentKind::QLearning => "qlearning",
            AgentKind::Arl => "arl",
        }
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qgreedyucb" => Ok(Self::QGreedyUcb),
            "qlearning" => Ok(Self::QLearning),
            "arl" => Ok(Self::Arl),
            other => Err(Error::Invalid(format!(
                "unknown agent kind '{other}' (expected qgreedyucb, qlearning or arl)"
            ))),
        }
    }
}

/// Select/observe interface shared by the learners.
///
/// Calls must alternate: `select` for the current state, then `observe` for
/// the resulting transition.
pub trait Agent: Send {
    fn select(&mut self, s: State) -> Action;
    fn observe(&mut self, s: State, a: Action, r: f64, next: State);
    fn tables(&self) -> &QTables;
}

pub fn make_agent(kind: AgentKind, p: &QueueParams, cfg: &LearnerConfig) -> Result<Box<dyn Agent>> {
    cfg.validate(p)?;
    Ok(match kind {
        AgentKind::QGreedyUcb => Box::new(QGreedyUcbAgent::new(p, cfg)),
        AgentKind::QLearning => Box::new(QLearningAgent::new(p, cfg)),
        AgentKind::Arl => Box::new(ArlAgent::new(p, cfg)),
    })
}
