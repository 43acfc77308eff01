use super::qlearning::epsilon_greedy;
use super::{step_size, Agent, LearnerConfig, QTables};
use crate::mdp::{Action, QueueParams, State};
use crate::rng::{agent_rng, SimRng};

/// Average-payoff RL baseline.
///
/// This is a reconstruction of the standard form of the algorithm: a
/// relative Q-update against a running average-reward estimate `rho`,
///
/// ```text
/// Q(s,a) <- Q(s,a) + g_k (r - rho + max_a' Q(s',a') - Q(s,a))
/// rho    <- rho + b_n (r + max_a' Q(s',a') - max_a Q(s,a) - rho)   (greedy steps only)
/// ```
///
/// with `g_k = phi/(k + theta)` per pair and `b_n = 1/(n + 1)` over the
/// count `n` of greedy steps. Both updates read the pre-update table.
#[derive(Debug, Clone)]
pub struct ArlAgent {
    tables: QTables,
    cfg: LearnerConfig,
    rng: SimRng,
    rho: f64,
    greedy_steps: u64,
    explored: bool,
}

impl ArlAgent {
    pub fn new(p: &QueueParams, cfg: &LearnerConfig) -> Self {
        Self::with_tables(QTables::new(p, false), cfg)
    }

    pub fn with_tables(tables: QTables, cfg: &LearnerConfig) -> Self {
        Self { tables, cfg: *cfg, rng: agent_rng(cfg.seed), rho: 0.0, greedy_steps: 0, explored: false }
    }

    /// Current average-reward estimate.
    pub fn rho(&self) -> f64 {
        self.rho
    }
}

impl Agent for ArlAgent {
    #[inline]
    fn select(&mut self, s: State) -> Action {
        let (a, explored) = epsilon_greedy(&self.tables.q, s, self.cfg.epsilon, &mut self.rng);
        self.explored = explored;
        a
    }

    #[inline]
    fn observe(&mut self, s: State, a: Action, r: f64, next: State) {
        let k = self.tables.bump(s, a);
        let step = step_size(self.cfg.phi, self.cfg.theta, k);
        let next_max = self.tables.q.row_max(next);
        let here_max = self.tables.q.row_max(s);
        let old = self.tables.q.get(s, a);
        self.tables.q.set(s, a, old + step * (r - self.rho + next_max - old));
        if !std::mem::take(&mut self.explored) {
            self.greedy_steps += 1;
            let beta = 1.0 / (self.greedy_steps as f64 + 1.0);
            self.rho += beta * (r + next_max - here_max - self.rho);
        }
        self.tables.t += 1;
    }

    fn tables(&self) -> &QTables {
        &self.tables
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::ActionSet;

    fn single_cell() -> QTables {
        QTables::from_feasible(vec![ActionSet::range(0, 0)], 1, false)
    }

    #[test]
    fn rho_converges_on_constant_reward() {
        let cfg = LearnerConfig { epsilon: 0.0, ..Default::default() };
        let mut agent = ArlAgent::with_tables(single_cell(), &cfg);
        for _ in 0..100_000 {
            let a = agent.select(State(0));
            agent.observe(State(0), a, -3.0, State(0));
        }
        assert!((agent.rho() - -3.0).abs() < 1e-3, "rho {}", agent.rho());
    }

    #[test]
    fn rho_frozen_on_exploratory_steps() {
        let cfg = LearnerConfig { epsilon: 1.0, ..Default::default() };
        let mut agent = ArlAgent::with_tables(single_cell(), &cfg);
        for _ in 0..1000 {
            let a = agent.select(State(0));
            agent.observe(State(0), a, -3.0, State(0));
        }
        assert_eq!(agent.rho(), 0.0);
        assert_eq!(agent.tables().t, 1000);
        assert!(agent.tables().q.get(State(0), Action(0)) < 0.0);
    }
}
