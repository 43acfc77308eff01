use crate::error::{Error, Result};
use crate::learners::{
    extract_policy, Agent, AgentKind, ArlAgent, LearnerConfig, QGreedyUcbAgent, QLearningAgent, QTables,
    StochasticPolicy,
};
use crate::mdp::QueueParams;
use crate::solver::DeterministicPolicy;

use super::env::EnvState;

/// Which slots get a metric point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecordSchedule {
    /// Log-spaced slots including 1 and `T`; every slot when `T <= max_points`.
    Logarithmic { max_points: usize },
    /// Exactly these slots, clipped to `1..=T`.
    Explicit(Vec<u64>),
}

impl Default for RecordSchedule {
    fn default() -> Self {
        RecordSchedule::Logarithmic { max_points: 2000 }
    }
}

impl RecordSchedule {
    /// Sorted, distinct slots in `1..=horizon`.
    pub fn points(&self, horizon: u64) -> Vec<u64> {
        let mut pts: Vec<u64> = match self {
            RecordSchedule::Explicit(ts) => ts.iter().copied().filter(|t| (1..=horizon).contains(t)).collect(),
            RecordSchedule::Logarithmic { max_points } => {
                let n = (*max_points as u64).min(horizon);
                if horizon <= n {
                    (1..=horizon).collect()
                } else if n <= 1 {
                    vec![horizon]
                } else {
                    let top = (horizon as f64).ln();
                    (0..n)
                        .map(|i| ((top * i as f64 / (n - 1) as f64).exp().round() as u64).clamp(1, horizon))
                        .collect()
                }
            }
        };
        pts.sort_unstable();
        pts.dedup();
        pts
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Optimal gain; without it no regret is reported.
    pub g_star: Option<f64>,
    pub schedule: RecordSchedule,
    /// Policy the greedy extraction is compared against at each recorded slot.
    pub reference: Option<DeterministicPolicy>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPoint {
    pub t: u64,
    pub cum_reward: f64,
    pub avg_reward: f64,
    pub regret: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub agent: Option<AgentKind>,
    pub seed: u64,
    pub horizon: u64,
    pub g_star: Option<f64>,
    pub points: Vec<MetricPoint>,
    pub cum_reward: f64,
    pub final_policy: StochasticPolicy,
    /// Final learner tables; the visit counts are the state-action histogram.
    pub tables: QTables,
    /// First recorded slot at which the greedy policy equalled the reference.
    pub first_match_step: Option<u64>,
    pub dropped_total: u64,
}

impl RunMetrics {
    pub fn final_avg_reward(&self) -> f64 {
        self.cum_reward / self.horizon as f64
    }

    pub fn final_regret(&self) -> Option<f64> {
        self.g_star.map(|g| self.horizon as f64 * g - self.cum_reward)
    }

    pub fn avg_reward_series(&self) -> Vec<(u64, f64)> {
        self.points.iter().map(|p| (p.t, p.avg_reward)).collect()
    }

    pub fn regret_series(&self) -> Option<Vec<(u64, f64)>> {
        self.g_star.map(|_| self.points.iter().map(|p| (p.t, p.regret.unwrap_or(f64::NAN))).collect())
    }
}

/// `regret(t) = t·g* - cumulative reward at t`, unclamped.
pub fn regret_series(prefix: &[(u64, f64)], g_star: f64) -> Vec<(u64, f64)> {
    prefix.iter().map(|&(t, cum)| (t, t as f64 * g_star - cum)).collect()
}

/// Runs any agent for `horizon` slots from an empty queue.
///
/// The environment is seeded with `seed`; the agent brings its own generator.
pub fn run_agent<A: Agent + ?Sized>(
    p: &QueueParams,
    agent: &mut A,
    seed: u64,
    horizon: u64,
    opts: &RunOptions,
) -> Result<RunMetrics> {
    if horizon == 0 {
        return Err(Error::Invalid("horizon must be at least 1".into()));
    }
    if let Some(g) = opts.g_star {
        if !g.is_finite() {
            return Err(Error::Invalid(format!("optimal gain must be finite, got {g}")));
        }
    }
    if let Some(pi) = &opts.reference {
        if !pi.is_feasible_for(p) {
            return Err(Error::Invalid("reference policy does not fit the queue parameters".into()));
        }
    }
    let mut env = EnvState::new(*p, seed)?;
    let record = opts.schedule.points(horizon);
    let mut next = record.iter().copied().peekable();
    let mut points = Vec::with_capacity(record.len());
    let mut first_match_step = None;
    let mut cum = 0.0;
    for t in 1..=horizon {
        let s = env.queue();
        let a = agent.select(s);
        let out = env.step(a)?;
        agent.observe(s, a, out.reward, out.next);
        cum += out.reward;
        if next.peek() == Some(&t) {
            next.next();
            points.push(MetricPoint {
                t,
                cum_reward: cum,
                avg_reward: cum / t as f64,
                regret: opts.g_star.map(|g| t as f64 * g - cum),
            });
            if let (None, Some(pi)) = (first_match_step, &opts.reference) {
                if extract_policy(agent.tables()).matches(pi) {
                    first_match_step = Some(t);
                }
            }
        }
    }
    let tables = agent.tables().clone();
    Ok(RunMetrics {
        agent: None,
        seed,
        horizon,
        g_star: opts.g_star,
        points,
        cum_reward: cum,
        final_policy: extract_policy(&tables),
        tables,
        first_match_step,
        dropped_total: env.dropped_total(),
    })
}

/// Trains a fresh learner of the given kind; `cfg.seed` seeds both the
/// environment and the agent.
pub fn run_experiment(
    p: &QueueParams,
    kind: AgentKind,
    cfg: &LearnerConfig,
    horizon: u64,
    opts: &RunOptions,
) -> Result<RunMetrics> {
    p.ensure_valid()?;
    cfg.validate(p)?;
    let mut m = match kind {
        AgentKind::QGreedyUcb => run_agent(p, &mut QGreedyUcbAgent::new(p, cfg), cfg.seed, horizon, opts),
        AgentKind::QLearning => run_agent(p, &mut QLearningAgent::new(p, cfg), cfg.seed, horizon, opts),
        AgentKind::Arl => run_agent(p, &mut ArlAgent::new(p, cfg), cfg.seed, horizon, opts),
    }?;
    m.agent = Some(kind);
    Ok(m)
}
