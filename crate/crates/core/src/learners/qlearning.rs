use rand::Rng;

use super::{argmax_random_tie, relative_update, step_size, Agent, LearnerConfig, QTables};
use crate::mdp::{Action, QueueParams, State};
use crate::rng::{agent_rng, SimRng};
use crate::table::StateActionTable;

/// ε-greedy draw over `table`. Returns the action and whether it was exploratory.
/// With `epsilon == 0` no exploration draw is made at all.
pub(crate) fn epsilon_greedy<R: Rng + ?Sized>(table: &StateActionTable, s: State, epsilon: f64, rng: &mut R) -> (Action, bool) {
    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        let set = table.feasible(s);
        (set.nth(rng.random_range(0..set.len())), true)
    } else {
        (argmax_random_tie(table, s, rng), false)
    }
}

/// Average-reward Q-learning with ε-greedy exploration: the relative update
/// without a bonus.
#[derive(Debug, Clone)]
pub struct QLearningAgent {
    tables: QTables,
    cfg: LearnerConfig,
    rng: SimRng,
}

impl QLearningAgent {
    pub fn new(p: &QueueParams, cfg: &LearnerConfig) -> Self {
        Self { tables: QTables::new(p, false), cfg: *cfg, rng: agent_rng(cfg.seed) }
    }
}

impl Agent for QLearningAgent {
    #[inline]
    fn select(&mut self, s: State) -> Action {
        epsilon_greedy(&self.tables.q, s, self.cfg.epsilon, &mut self.rng).0
    }

    #[inline]
    fn observe(&mut self, s: State, a: Action, r: f64, next: State) {
        let k = self.tables.bump(s, a);
        let step = step_size(self.cfg.phi, self.cfg.theta, k);
        relative_update(&mut self.tables, s, a, r, next, step, 0.0, self.cfg.ref_state);
        self.tables.t += 1;
    }

    fn tables(&self) -> &QTables {
        &self.tables
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{feasible_actions, next_state, reward_unchecked, ArrivalFlag};
    use rand::SeedableRng;

    fn p() -> QueueParams {
        QueueParams::new(10, 5, 4, 0.4, 1.0)
    }

    #[test]
    fn zero_epsilon_follows_greedy_trajectory() {
        let p = p();
        let cfg = LearnerConfig { epsilon: 0.0, seed: 9, ..Default::default() };
        let mut agent = QLearningAgent::new(&p, &cfg);
        // shadow: pure greedy over the same tables with the same agent stream
        let mut shadow_rng = agent_rng(9);
        let mut env = SimRng::seed_from_u64(1);
        let mut s = State(0);
        for _ in 0..5_000 {
            let expect = argmax_random_tie(&agent.tables().q, s, &mut shadow_rng);
            let a = agent.select(s);
            assert_eq!(a, expect);
            let next = next_state(&p, s, a, ArrivalFlag(env.random_bool(p.alpha))).unwrap().next;
            agent.observe(s, a, reward_unchecked(&p, s.0, a.0), next);
            s = next;
        }
    }

    #[test]
    fn full_exploration_is_uniform() {
        // chi-square goodness of fit per state, 1e5 draws each
        let p = p();
        let cfg = LearnerConfig { epsilon: 1.0, ..Default::default() };
        let mut agent = QLearningAgent::new(&p, &cfg);
        agent.tables.q.set(State(7), Action(3), 5.0);
        for q in [2usize, 4, 7] {
            let set = feasible_actions(&p, State(q));
            let n = 100_000;
            let mut counts = vec![0f64; p.num_actions()];
            for _ in 0..n {
                counts[agent.select(State(q)).0] += 1.0;
            }
            let expect = n as f64 / set.len() as f64;
            let chi2: f64 = set.iter().map(|a| (counts[a.0] - expect).powi(2) / expect).sum();
            // 99.9% quantiles: df=1 10.83, df=2 13.82, df=4 18.47
            let crit = [0.0, 10.83, 13.82, 16.27, 18.47][set.len() - 1];
            assert!(chi2 < crit, "q={q} chi2={chi2}");
            let outside: f64 = (0..p.num_actions()).filter(|&c| !set.contains(Action(c))).map(|c| counts[c]).sum();
            assert_eq!(outside, 0.0);
        }
    }

    #[test]
    fn update_has_no_bonus() {
        let p = p();
        let cfg = LearnerConfig::default();
        let mut agent = QLearningAgent::new(&p, &cfg);
        agent.observe(State(5), Action(2), -6.5, State(8));
        assert_eq!(agent.tables().q.get(State(5), Action(2)), 0.5 * -6.5);
        assert!(agent.tables().qhat.is_none());
    }
}
