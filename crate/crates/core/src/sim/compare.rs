use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::learners::{AgentKind, LearnerConfig};
use crate::mdp::{build_transition_model, QueueParams, State};
use crate::solver::{solve_exact, SolveResult};

use super::experiment::{run_experiment, RecordSchedule, RunMetrics, RunOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub agent: AgentKind,
    pub seed: u64,
    pub final_avg_reward: f64,
    pub final_regret: f64,
    pub first_match_step: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    fn of(xs: impl IntoIterator<Item = f64>) -> Option<Self> {
        let xs: Vec<f64> = xs.into_iter().collect();
        if xs.is_empty() {
            return None;
        }
        Some(Spread {
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentSummary {
    pub agent: AgentKind,
    pub runs: usize,
    pub avg_reward: Spread,
    pub regret: Spread,
    /// Runs whose greedy policy matched the exact one at some recorded slot.
    pub matched: usize,
    /// Spread of the first match slot over the runs that matched.
    pub first_match: Option<Spread>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub exact: SolveResult,
    /// One row per (agent, seed), agents in input order, seeds in input order.
    pub rows: Vec<CompareRow>,
    pub summaries: Vec<AgentSummary>,
    /// Full run records, parallel to `rows`.
    pub runs: Vec<RunMetrics>,
}

impl CompareReport {
    pub fn summary(&self, agent: AgentKind) -> Option<&AgentSummary> {
        self.summaries.iter().find(|s| s.agent == agent)
    }
}

fn check_distinct(kinds: &[AgentKind]) -> Result<()> {
    for (i, k) in kinds.iter().enumerate() {
        if kinds[..i].contains(k) {
            return Err(Error::Invalid(format!("agent kind '{k}' listed more than once")));
        }
    }
    Ok(())
}

/// Trains every agent kind on every seed against the same queue and scores
/// them against the exact solution.
///
/// All runs share `cfg` except for the seed. Output order does not depend on
/// scheduling.
pub fn multi_seed_compare(
    p: &QueueParams,
    kinds: &[AgentKind],
    cfg: &LearnerConfig,
    horizon: u64,
    seeds: &[u64],
    schedule: &RecordSchedule,
) -> Result<CompareReport> {
    if kinds.is_empty() {
        return Err(Error::Invalid("no agent kinds given".into()));
    }
    if seeds.is_empty() {
        return Err(Error::Invalid("no seeds given".into()));
    }
    check_distinct(kinds)?;
    let exact = solve_exact(&build_transition_model(p)?)?;
    let opts = RunOptions { g_star: Some(exact.gain), schedule: schedule.clone(), reference: Some(exact.policy.clone()) };
    let jobs: Vec<(AgentKind, u64)> = kinds.iter().flat_map(|&k| seeds.iter().map(move |&s| (k, s))).collect();
    let runs = jobs
        .par_iter()
        .map(|&(kind, seed)| run_experiment(p, kind, &cfg.with_seed(seed), horizon, &opts))
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<CompareRow> = jobs
        .iter()
        .zip(&runs)
        .map(|(&(agent, seed), m)| CompareRow {
            agent,
            seed,
            final_avg_reward: m.final_avg_reward(),
            final_regret: m.final_regret().expect("gain supplied"),
            first_match_step: m.first_match_step,
        })
        .collect();
    let summaries = kinds
        .iter()
        .map(|&agent| {
            let mine: Vec<&CompareRow> = rows.iter().filter(|r| r.agent == agent).collect();
            let firsts: Vec<f64> = mine.iter().filter_map(|r| r.first_match_step).map(|t| t as f64).collect();
            AgentSummary {
                agent,
                runs: mine.len(),
                avg_reward: Spread::of(mine.iter().map(|r| r.final_avg_reward)).expect("at least one seed"),
                regret: Spread::of(mine.iter().map(|r| r.final_regret)).expect("at least one seed"),
                matched: firsts.len(),
                first_match: Spread::of(firsts),
            }
        })
        .collect();
    Ok(CompareReport { exact, rows, summaries, runs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaPoint {
    pub alpha: f64,
    pub exact: SolveResult,
    /// One run per seed, in seed order.
    pub runs: Vec<RunMetrics>,
}

impl AlphaPoint {
    /// Seeds whose final greedy policy equals the exact one.
    pub fn matching_runs(&self) -> usize {
        self.runs.iter().filter(|m| m.final_policy.matches(&self.exact.policy)).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSweep {
    /// In input order.
    pub points: Vec<AlphaPoint>,
}

impl AlphaSweep {
    fn ascending(&self) -> Vec<&AlphaPoint> {
        let mut pts: Vec<&AlphaPoint> = self.points.iter().collect();
        pts.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        pts
    }

    /// `(state, lower alpha, higher alpha)` wherever the exact service rate
    /// drops as alpha grows. Empty means pointwise nondecreasing.
    pub fn rate_decreases(&self) -> Vec<(State, f64, f64)> {
        let pts = self.ascending();
        let mut out = Vec::new();
        for w in pts.windows(2) {
            let (lo, hi) = (&w[0].exact.policy, &w[1].exact.policy);
            for s in 0..lo.len() {
                if hi.action(State(s)) < lo.action(State(s)) {
                    out.push((State(s), w[0].alpha, w[1].alpha));
                }
            }
        }
        out
    }

    pub fn gain_strictly_decreasing(&self) -> bool {
        self.ascending().windows(2).all(|w| w[1].exact.gain < w[0].exact.gain)
    }
}

/// Exact solution plus learner runs for each arrival probability.
pub fn alpha_sweep(
    base: &QueueParams,
    alphas: &[f64],
    kind: AgentKind,
    cfg: &LearnerConfig,
    horizon: u64,
    seeds: &[u64],
    schedule: &RecordSchedule,
) -> Result<AlphaSweep> {
    if alphas.is_empty() {
        return Err(Error::Invalid("empty alpha grid".into()));
    }
    let exact = alphas
        .par_iter()
        .map(|&alpha| {
            let p = base.with_alpha(alpha);
            Ok((p, solve_exact(&build_transition_model(&p)?)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, u64)> = (0..alphas.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let mut runs = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let (p, sol) = &exact[i];
            let opts =
                RunOptions { g_star: Some(sol.gain), schedule: schedule.clone(), reference: Some(sol.policy.clone()) };
            run_experiment(p, kind, &cfg.with_seed(seed), horizon, &opts)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    let points = alphas
        .iter()
        .zip(exact)
        .map(|(&alpha, (_, sol))| AlphaPoint { alpha, exact: sol, runs: runs.by_ref().take(seeds.len()).collect() })
        .collect();
    Ok(AlphaSweep { points })
}
