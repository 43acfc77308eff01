use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{apply, feasible_actions, reward_unchecked, Action, ArrivalFlag, QueueParams, State};
use crate::rng::{env_rng, SimRng};

/// A seeded queue. Starts empty at slot 0.
#[derive(Debug, Clone)]
pub struct EnvState {
    params: QueueParams,
    q: State,
    rng: SimRng,
    t: u64,
    dropped_total: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Reward of the pre-transition `(q, c)`; independent of the arrival.
    pub reward: f64,
    pub next: State,
    pub tau: ArrivalFlag,
    pub dropped: usize,
}

impl EnvState {
    pub fn new(params: QueueParams, seed: u64) -> Result<Self> {
        params.ensure_valid()?;
        Ok(Self { params, q: State(0), rng: env_rng(seed), t: 0, dropped_total: 0 })
    }

    pub fn params(&self) -> &QueueParams {
        &self.params
    }

    pub fn queue(&self) -> State {
        self.q
    }

    pub fn slot(&self) -> u64 {
        self.t
    }

    pub fn dropped_total(&self) -> u64 {
        self.dropped_total
    }

    /// Serves `a` packets, then draws the arrival as `u < alpha` for a
    /// uniform `u` in `[0, 1)` from the environment stream.
    #[inline]
    pub fn step(&mut self, a: Action) -> Result<StepOutcome> {
        if !feasible_actions(&self.params, self.q).contains(a) {
            return Err(Error::InfeasibleAction { state: self.q, action: a });
        }
        let reward = reward_unchecked(&self.params, self.q.0, a.0);
        let arrived = self.rng.random::<f64>() < self.params.alpha;
        let tr = apply(&self.params, self.q.0, a.0, arrived);
        self.q = tr.next;
        self.t += 1;
        self.dropped_total += tr.dropped as u64;
        Ok(StepOutcome { reward, next: tr.next, tau: ArrivalFlag(arrived), dropped: tr.dropped })
    }
}

pub fn env_step(env: &mut EnvState, a: Action) -> Result<StepOutcome> {
    env.step(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::immediate_reward;

    fn trace(seed: u64) -> Vec<(bool, usize, f64)> {
        let p = QueueParams::new(10, 5, 4, 0.4, 1.0);
        let mut env = EnvState::new(p, seed).unwrap();
        (0..1000)
            .map(|i| {
                let set = feasible_actions(&p, env.queue());
                let a = set.nth(i % set.len());
                let o = env.step(a).unwrap();
                (o.tau.0, o.next.0, o.reward)
            })
            .collect()
    }

    #[test]
    fn seeded_trace_is_reproducible() {
        assert_eq!(trace(42), trace(42));
        assert_ne!(trace(42), trace(43));
    }

    #[test]
    fn arrival_frequency_within_three_sigma() {
        let p = QueueParams::new(10, 5, 4, 0.4, 1.0);
        let mut env = EnvState::new(p, 2024).unwrap();
        let n = 1_000_000u64;
        let mut hits = 0u64;
        for _ in 0..n {
            let a = feasible_actions(&p, env.queue()).max();
            hits += env.step(a).unwrap().tau.0 as u64;
        }
        let sd = (p.alpha * (1.0 - p.alpha) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p.alpha).abs() < 3.0 * sd);
    }

    #[test]
    fn reward_matches_model() {
        let p = QueueParams::new(10, 5, 4, 0.4, 1.0);
        let mut env = EnvState::new(p, 1).unwrap();
        for _ in 0..500 {
            let s = env.queue();
            let a = feasible_actions(&p, s).min();
            let o = env.step(a).unwrap();
            assert_eq!(o.reward, immediate_reward(&p, s, a).unwrap());
        }
        assert_eq!(env.slot(), 500);
    }

    #[test]
    fn rejects_infeasible_action() {
        let p = QueueParams::new(10, 5, 4, 0.4, 1.0);
        let mut env = EnvState::new(p, 1).unwrap();
        assert!(env.step(Action(1)).is_err());
        assert_eq!(env.slot(), 0);
    }
}
