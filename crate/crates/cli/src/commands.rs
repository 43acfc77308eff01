use std::fmt;

use anyhow::{anyhow, bail, Result};
use qsched_core::export::{
    write_alpha_sweep_csv, write_compare_csv, write_metrics_csv, write_policy_csv, write_qtable_csv,
    write_stochastic_policy_csv, write_summary_csv, write_sweep_csv, write_tradeoff_csv,
};
use qsched_core::sim::{alpha_sweep, multi_seed_compare};
use qsched_core::solver::{
    constraint_solve, count_monotone_policies, enumerate_monotone_policies, sweep_lambda, tradeoff_frontier,
    tradeoff_points,
};
use qsched_core::{
    build_transition_model, evaluate_policy, run_experiment, solve_exact, AgentKind, Error, QueueParams,
    RecordSchedule, RunOptions,
};

use crate::config::RunConfig;
use crate::output::{significant, write_metadata, OutDir};

/// Bad invocation rather than a failed computation; exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn strict_params(cfg: &RunConfig) -> Result<QueueParams> {
    let p = cfg.params();
    p.validate().map_err(Error::InvalidParams)?;
    Ok(p)
}

fn require_horizon(cfg: &RunConfig) -> Result<()> {
    if cfg.horizon == 0 {
        return Err(usage("horizon must be at least 1"));
    }
    Ok(())
}

fn schedule(cfg: &RunConfig) -> Result<RecordSchedule> {
    if cfg.record_points == 0 {
        return Err(usage("record_points must be at least 1"));
    }
    Ok(RecordSchedule::Logarithmic { max_points: cfg.record_points })
}

pub fn solve(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    let p = strict_params(cfg)?;
    let model = build_transition_model(&p)?;
    let sol = solve_exact(&model)?;
    let eval = evaluate_policy(&model, &sol.policy)?;
    println!("gain {}", significant(sol.gain, 6));
    println!("policy {}", sol.policy);
    println!("delay {}  power {}  ({} iterations)", significant(eval.delay, 6), significant(eval.power, 6), sol.iterations);
    out.write("policy.csv", |w| write_policy_csv(w, &sol.policy))?;
    write_metadata(out, "solve", cfg)?;
    Ok(())
}

pub fn train(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    require_horizon(cfg)?;
    let p = strict_params(cfg)?;
    let kind = cfg.agent_kind()?;
    let learner = cfg.learner();
    learner.validate(&p)?;
    let sol = solve_exact(&build_transition_model(&p)?)?;
    let opts = RunOptions { g_star: Some(sol.gain), schedule: schedule(cfg)?, reference: Some(sol.policy.clone()) };
    let m = run_experiment(&p, kind, &learner, cfg.horizon, &opts)?;
    println!("agent {kind}  seed {}  horizon {}", m.seed, m.horizon);
    println!("final average reward {}  (exact gain {})", significant(m.final_avg_reward(), 6), significant(sol.gain, 6));
    println!("final regret {}", significant(m.final_regret().expect("gain supplied"), 6));
    match m.first_match_step {
        Some(t) => println!("greedy policy first matched the exact policy at t = {t}"),
        None => println!("greedy policy never matched the exact policy at a recorded step"),
    }
    let mismatched = m.final_policy.mismatched_states(&sol.policy);
    if mismatched.is_empty() {
        println!("final policy equals the exact policy");
    } else {
        let states: Vec<String> = mismatched.iter().map(|s| s.to_string()).collect();
        println!("final policy differs from the exact policy at q = {}", states.join(", "));
    }
    out.write("metrics.csv", |w| write_metrics_csv(w, &m))?;
    out.write("policy.csv", |w| write_stochastic_policy_csv(w, &m.final_policy))?;
    out.write("qtable.csv", |w| write_qtable_csv(w, &m.tables))?;
    write_metadata(out, "train", cfg)?;
    Ok(())
}

pub fn tradeoff(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    // the forced B = M boundary is accepted here; it has exactly one policy
    let p = cfg.params();
    p.validate_structure().map_err(Error::InvalidParams)?;
    let count = count_monotone_policies(&p);
    if count > cfg.policy_cap as u128 {
        bail!("instance has {count} monotone policies, above the cap of {} (raise --policy-cap)", cfg.policy_cap);
    }
    let model = build_transition_model(&p)?;
    let policies = enumerate_monotone_policies(&p);
    let points = tradeoff_points(&model, &policies)?;
    let frontier = tradeoff_frontier(&points);
    println!("{} monotone policies, {} frontier vertices", points.len(), frontier.len());
    for v in &frontier {
        println!(
            "  policy {:>6}  D {}  E {}  [{}]",
            v.policy_id,
            significant(v.delay, 6),
            significant(v.power, 6),
            policies[v.policy_id]
        );
    }
    out.write("tradeoff.csv", |w| write_tradeoff_csv(w, &points, &frontier))?;
    write_metadata(out, "tradeoff", cfg)?;
    if let Some(budget) = cfg.e_th {
        let mix = constraint_solve(&frontier, budget)?;
        let parts: Vec<String> =
            mix.weights.iter().map(|(id, w)| format!("{} x policy {id} [{}]", significant(*w, 6), policies[*id])).collect();
        println!("budget {budget}: D {}  E {}  via {}", significant(mix.delay, 6), significant(mix.power, 6), parts.join(" + "));
    }
    Ok(())
}

pub fn sweep(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    if cfg.lambdas.is_empty() && cfg.alphas.is_empty() {
        return Err(usage("sweep needs a nonempty --lambdas or --alphas grid"));
    }
    let mut failures = Vec::new();
    if !cfg.lambdas.is_empty() {
        let base = strict_params(cfg)?;
        let results = sweep_lambda(&base, &cfg.lambdas);
        let mut ok = Vec::new();
        for (lambda, r) in cfg.lambdas.iter().zip(results) {
            match r {
                Ok(pt) => {
                    println!(
                        "lambda {lambda}: gain {}  D {}  E {}  [{}]",
                        significant(pt.solve.gain, 6),
                        significant(pt.eval.delay, 6),
                        significant(pt.eval.power, 6),
                        pt.solve.policy
                    );
                    ok.push(pt);
                }
                Err(e) => {
                    eprintln!("lambda {lambda}: {e}");
                    failures.push(format!("lambda {lambda}"));
                }
            }
        }
        out.write("sweep.csv", |w| write_sweep_csv(w, &ok))?;
    }
    if !cfg.alphas.is_empty() {
        require_horizon(cfg)?;
        let base = strict_params(cfg)?;
        let kind = cfg.agent_kind()?;
        let bad: Vec<String> = cfg
            .alphas
            .iter()
            .filter_map(|&a| base.with_alpha(a).validate().err().map(|_| a.to_string()))
            .collect();
        if !bad.is_empty() {
            bail!("alpha grid values outside (0, 1): {}", bad.join(", "));
        }
        let learner = cfg.learner();
        learner.validate(&base)?;
        let sw = alpha_sweep(&base, &cfg.alphas, kind, &learner, cfg.horizon, &[cfg.seed], &schedule(cfg)?)?;
        for pt in &sw.points {
            println!(
                "alpha {}: gain {}  [{}]  {kind} matches: {}",
                pt.alpha,
                significant(pt.exact.gain, 6),
                pt.exact.policy,
                pt.matching_runs() == pt.runs.len()
            );
            let dir = format!("alpha_{}", pt.alpha);
            out.write(&format!("{dir}/policy.csv"), |w| write_policy_csv(w, &pt.exact.policy))?;
            let run = &pt.runs[0];
            out.write(&format!("{dir}/learned_policy.csv"), |w| write_stochastic_policy_csv(w, &run.final_policy))?;
            out.write(&format!("{dir}/metrics.csv"), |w| write_metrics_csv(w, run))?;
        }
        let drops = sw.rate_decreases();
        if drops.is_empty() {
            println!("exact service rates are pointwise nondecreasing in alpha");
        } else {
            for (s, lo, hi) in drops {
                println!("exact service rate at q = {s} drops between alpha {lo} and {hi}");
            }
        }
        println!("exact gain strictly decreasing in alpha: {}", sw.gain_strictly_decreasing());
        out.write("alpha_sweep.csv", |w| write_alpha_sweep_csv(w, &sw))?;
    }
    write_metadata(out, "sweep", cfg)?;
    if !failures.is_empty() {
        return Err(anyhow!("{} grid point(s) failed: {}", failures.len(), failures.join(", ")));
    }
    Ok(())
}

pub fn compare(cfg: &RunConfig, out: &OutDir) -> Result<()> {
    require_horizon(cfg)?;
    let p = strict_params(cfg)?;
    let kinds = cfg.agent_kinds()?;
    if kinds.len() < 2 {
        return Err(usage("compare needs at least two distinct agent kinds"));
    }
    if cfg.seeds.is_empty() {
        return Err(usage("compare needs at least one seed"));
    }
    let learner = cfg.learner();
    learner.validate(&p)?;
    let rep = multi_seed_compare(&p, &kinds, &learner, cfg.horizon, &cfg.seeds, &schedule(cfg)?)?;
    println!("exact gain {}  policy [{}]", significant(rep.exact.gain, 6), rep.exact.policy);
    for s in &rep.summaries {
        println!(
            "{:<10}  avg reward {} [{}, {}]  regret {} [{}, {}]  matched {}/{}",
            s.agent.name(),
            significant(s.avg_reward.mean, 6),
            significant(s.avg_reward.min, 6),
            significant(s.avg_reward.max, 6),
            significant(s.regret.mean, 6),
            significant(s.regret.min, 6),
            significant(s.regret.max, 6),
            s.matched,
            s.runs
        );
    }
    if let (Some(ucb), Some(ql)) = (rep.summary(AgentKind::QGreedyUcb), rep.summary(AgentKind::QLearning)) {
        let reduction = 1.0 - ucb.regret.mean / ql.regret.mean;
        println!("qgreedyucb mean regret is {:.1}% below qlearning", 100.0 * reduction);
    }
    out.write("compare.csv", |w| write_compare_csv(w, &rep.rows))?;
    out.write("summary.csv", |w| write_summary_csv(w, &rep.summaries))?;
    for (row, run) in rep.rows.iter().zip(&rep.runs) {
        out.write(&format!("runs/{}_seed{}.csv", row.agent.name(), row.seed), |w| write_metrics_csv(w, run))?;
    }
    write_metadata(out, "compare", cfg)?;
    Ok(())
}
