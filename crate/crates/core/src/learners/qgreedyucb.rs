use rand::Rng;

use super::{argmax_random_tie, bonus, relative_update, step_size, Agent, LearnerConfig, QTables};
use crate::mdp::{Action, QueueParams, State};
use crate::rng::{agent_rng, SimRng};

/// Greedy action on the historical-minimum table `Qhat`, ties broken uniformly.
pub fn qgreedyucb_select<R: Rng + ?Sized>(tables: &QTables, s: State, rng: &mut R) -> Action {
    let qhat = tables.qhat.as_ref().expect("Q-greedyUCB tables carry Qhat");
    argmax_random_tie(qhat, s, rng)
}

/// One Q-greedyUCB update.
///
/// Order matters: the visit count is bumped first so `k >= 1`, the bonus
/// uses the 1-based index of the current step, and `Qhat` is folded in after
/// the Q-update.
pub fn qgreedyucb_observe(tables: &mut QTables, s: State, a: Action, r: f64, next: State, cfg: &LearnerConfig) {
    let k = tables.bump(s, a);
    let t = tables.t + 1;
    let b = bonus(cfg.sigma, cfg.delta, tables.num_states(), tables.num_actions(), k, t)
        .expect("k and t are at least 1");
    relative_update(tables, s, a, r, next, step_size(cfg.phi, cfg.theta, k), b, cfg.ref_state);
    let q = tables.q.get(s, a);
    let qhat = tables.qhat.as_mut().expect("Q-greedyUCB tables carry Qhat");
    if q < qhat.get(s, a) {
        qhat.set(s, a, q);
    }
    tables.t = t;
}

#[derive(Debug, Clone)]
pub struct QGreedyUcbAgent {
    tables: QTables,
    cfg: LearnerConfig,
    rng: SimRng,
}

impl QGreedyUcbAgent {
    pub fn new(p: &QueueParams, cfg: &LearnerConfig) -> Self {
        Self { tables: QTables::new(p, true), cfg: *cfg, rng: agent_rng(cfg.seed) }
    }
}

impl Agent for QGreedyUcbAgent {
    #[inline]
    fn select(&mut self, s: State) -> Action {
        qgreedyucb_select(&self.tables, s, &mut self.rng)
    }

    #[inline]
    fn observe(&mut self, s: State, a: Action, r: f64, next: State) {
        qgreedyucb_observe(&mut self.tables, s, a, r, next, &self.cfg);
    }

    fn tables(&self) -> &QTables {
        &self.tables
    }
}
