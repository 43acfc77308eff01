//! CSV artifacts.
//!
//! Every file has a header row, comma separators and `\n` line endings.
//! Floats use Rust's shortest round-trip formatting, so parsing a field back
//! gives the identical `f64`.

use std::io;

use crate::error::{Error, Result};
use crate::learners::{QTables, StochasticPolicy};
use crate::sim::{AgentSummary, AlphaSweep, CompareRow, RunMetrics};
use crate::solver::{DeterministicPolicy, SweepPoint, TradeoffPoint};

fn writer<W: io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn join(actions: impl IntoIterator<Item = usize>) -> String {
    actions.into_iter().map(|a| a.to_string()).collect::<Vec<_>>().join(";")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// `state,action`.
pub fn write_policy_csv<W: io::Write>(w: W, pi: &DeterministicPolicy) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["state", "action"])?;
    for (s, a) in pi.actions().iter().enumerate() {
        out.write_record([s.to_string(), a.0.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Same schema as [`write_policy_csv`]; tied greedy actions are joined with `;`.
pub fn write_stochastic_policy_csv<W: io::Write>(w: W, pi: &StochasticPolicy) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["state", "action"])?;
    for s in 0..pi.num_states() {
        let support = pi.support(crate::mdp::State(s));
        out.write_record([s.to_string(), join(support.iter().map(|a| a.0))])?;
    }
    out.flush()?;
    Ok(())
}

/// Parses a `state,action` file; each entry lists the (possibly tied) actions.
pub fn read_policy_csv<R: io::Read>(r: R) -> Result<Vec<Vec<usize>>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(r);
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = || Error::Invalid(format!("malformed policy row {}", i + 1));
        let state: usize = rec.get(0).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        if state != i {
            return Err(Error::Invalid(format!("policy rows out of order at state {state}")));
        }
        let actions = rec
            .get(1)
            .ok_or_else(bad)?
            .split(';')
            .map(|a| a.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        rows.push(actions);
    }
    Ok(rows)
}

/// `policy_id,D,E,on_frontier`, sorted by delay then id.
pub fn write_tradeoff_csv<W: io::Write>(w: W, points: &[TradeoffPoint], frontier: &[TradeoffPoint]) -> Result<()> {
    let mut rows: Vec<&TradeoffPoint> = points.iter().collect();
    rows.sort_by(|a, b| a.delay.total_cmp(&b.delay).then(a.policy_id.cmp(&b.policy_id)));
    let mut out = writer(w);
    out.write_record(["policy_id", "D", "E", "on_frontier"])?;
    for p in rows {
        let on = frontier.iter().any(|f| f.policy_id == p.policy_id);
        out.write_record([p.policy_id.to_string(), p.delay.to_string(), p.power.to_string(), on.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// `lambda,gain,D,E,policy`, one row per solved grid point.
pub fn write_sweep_csv<'a, W: io::Write>(w: W, points: impl IntoIterator<Item = &'a SweepPoint>) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["lambda", "gain", "D", "E", "policy"])?;
    for p in points {
        out.write_record([
            p.lambda.to_string(),
            p.solve.gain.to_string(),
            p.eval.delay.to_string(),
            p.eval.power.to_string(),
            join(p.solve.policy.actions().iter().map(|a| a.0)),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `t,cum_reward,avg_reward,regret`; regret is empty when no gain was given.
pub fn write_metrics_csv<W: io::Write>(w: W, m: &RunMetrics) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "cum_reward", "avg_reward", "regret"])?;
    for p in &m.points {
        out.write_record([p.t.to_string(), p.cum_reward.to_string(), p.avg_reward.to_string(), opt(p.regret)])?;
    }
    out.flush()?;
    Ok(())
}

/// `agent,seed,final_avg_reward,final_regret,first_match_step`; a run that
/// never matched reports `never`.
pub fn write_compare_csv<W: io::Write>(w: W, rows: &[CompareRow]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["agent", "seed", "final_avg_reward", "final_regret", "first_match_step"])?;
    for r in rows {
        out.write_record([
            r.agent.name().to_string(),
            r.seed.to_string(),
            r.final_avg_reward.to_string(),
            r.final_regret.to_string(),
            r.first_match_step.map_or_else(|| "never".to_string(), |t| t.to_string()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Per-agent aggregates of a comparison: mean, min and max of the final
/// average reward and final regret, plus how many runs matched the exact
/// policy and the spread of their first match slot.
pub fn write_summary_csv<W: io::Write>(w: W, summaries: &[AgentSummary]) -> Result<()> {
    let mut out = writer(w);
    out.write_record([
        "agent",
        "runs",
        "avg_reward_mean",
        "avg_reward_min",
        "avg_reward_max",
        "regret_mean",
        "regret_min",
        "regret_max",
        "matched",
        "first_match_mean",
        "first_match_min",
        "first_match_max",
    ])?;
    for s in summaries {
        let fm = s.first_match;
        out.write_record([
            s.agent.name().to_string(),
            s.runs.to_string(),
            s.avg_reward.mean.to_string(),
            s.avg_reward.min.to_string(),
            s.avg_reward.max.to_string(),
            s.regret.mean.to_string(),
            s.regret.min.to_string(),
            s.regret.max.to_string(),
            s.matched.to_string(),
            opt(fm.map(|f| f.mean)),
            opt(fm.map(|f| f.min)),
            opt(fm.map(|f| f.max)),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `alpha,seed,gain,policy,learned_policy,final_avg_reward,matches`, one row
/// per (alpha, seed). Tied learned actions are joined with `|`.
pub fn write_alpha_sweep_csv<W: io::Write>(w: W, sweep: &AlphaSweep) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["alpha", "seed", "gain", "policy", "learned_policy", "final_avg_reward", "matches"])?;
    for pt in &sweep.points {
        for run in &pt.runs {
            let learned = (0..run.final_policy.num_states())
                .map(|s| join(run.final_policy.support(crate::mdp::State(s)).iter().map(|a| a.0)).replace(';', "|"))
                .collect::<Vec<_>>()
                .join(";");
            out.write_record([
                pt.alpha.to_string(),
                run.seed.to_string(),
                pt.exact.gain.to_string(),
                join(pt.exact.policy.actions().iter().map(|a| a.0)),
                learned,
                run.final_avg_reward().to_string(),
                run.final_policy.matches(&pt.exact.policy).to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `state,action,Q,Qhat,N` over feasible cells; `Qhat` is empty for agents
/// that do not keep one.
pub fn write_qtable_csv<W: io::Write>(w: W, t: &QTables) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["state", "action", "Q", "Qhat", "N"])?;
    for (s, a, q) in t.q.iter() {
        out.write_record([
            s.0.to_string(),
            a.0.to_string(),
            q.to_string(),
            opt(t.qhat.as_ref().map(|h| h.get(s, a))),
            t.visits(s, a).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::{extract_policy, AgentKind, LearnerConfig};
    use crate::mdp::{build_transition_model, QueueParams};
    use crate::sim::{run_experiment, RecordSchedule, RunOptions};
    use crate::solver::{enumerate_monotone_policies, solve_exact, tradeoff_frontier, tradeoff_points};

    fn text(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn policy_round_trip() {
        let p = QueueParams::new(10, 5, 4, 0.4, 1.0);
        let sol = solve_exact(&build_transition_model(&p).unwrap()).unwrap();
        let s = text(|b| write_policy_csv(b, &sol.policy));
        assert!(s.starts_with("state,action\n0,0\n1,1\n"));
        assert!(!s.contains('\r'));
        let back = read_policy_csv(s.as_bytes()).unwrap();
        let direct: Vec<Vec<usize>> = sol.policy.actions().iter().map(|a| vec![a.0]).collect();
        assert_eq!(back, direct);
    }

    #[test]
    fn stochastic_policy_joins_ties() {
        let p = QueueParams::new(10, 5, 4, 0.4, 1.0);
        let t = QTables::new(&p, false);
        let s = text(|b| write_stochastic_policy_csv(b, &extract_policy(&t)));
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "state,action");
        assert_eq!(lines[1], "0,0");
        assert_eq!(lines[3], "2,0;1;2");
        assert_eq!(read_policy_csv(s.as_bytes()).unwrap()[2], vec![0, 1, 2]);
    }

    #[test]
    fn tradeoff_rows_sorted_and_flagged() {
        let p = QueueParams::new(6, 3, 3, 0.5, 0.0);
        let model = build_transition_model(&p).unwrap();
        let pts = tradeoff_points(&model, &enumerate_monotone_policies(&p)).unwrap();
        let fr = tradeoff_frontier(&pts);
        let s = text(|b| write_tradeoff_csv(b, &pts, &fr));
        let mut rdr = csv::Reader::from_reader(s.as_bytes());
        assert_eq!(rdr.headers().unwrap(), vec!["policy_id", "D", "E", "on_frontier"]);
        let rows: Vec<(f64, bool)> =
            rdr.records().map(|r| r.unwrap()).map(|r| (r[1].parse().unwrap(), r[3].parse().unwrap())).collect();
        assert_eq!(rows.len(), 40);
        assert!(rows.windows(2).all(|w| w[0].0 <= w[1].0));
        assert_eq!(rows.iter().filter(|r| r.1).count(), fr.len());
    }

    #[test]
    fn metrics_floats_round_trip() {
        let p = QueueParams::new(10, 5, 4, 0.4, 1.0);
        let opts = RunOptions { g_star: Some(-7.3), schedule: RecordSchedule::Explicit(vec![1, 10, 999]), ..Default::default() };
        let m = run_experiment(&p, AgentKind::QLearning, &LearnerConfig::default(), 1000, &opts).unwrap();
        let s = text(|b| write_metrics_csv(b, &m));
        let mut rdr = csv::Reader::from_reader(s.as_bytes());
        let back: Vec<(u64, f64, f64, f64)> = rdr
            .records()
            .map(|r| r.unwrap())
            .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap(), r[3].parse().unwrap()))
            .collect();
        assert_eq!(back.len(), 3);
        for (b, p) in back.iter().zip(&m.points) {
            assert_eq!(*b, (p.t, p.cum_reward, p.avg_reward, p.regret.unwrap()));
        }
        let no_gain = run_experiment(&p, AgentKind::QLearning, &LearnerConfig::default(), 1, &RunOptions::default()).unwrap();
        assert_eq!(text(|b| write_metrics_csv(b, &no_gain)), "t,cum_reward,avg_reward,regret\n1,0,0,\n");
    }

    #[test]
    fn compare_and_qtable_schemas() {
        let rows = [CompareRow {
            agent: AgentKind::QGreedyUcb,
            seed: 4,
            final_avg_reward: -7.5,
            final_regret: 12.25,
            first_match_step: None,
        }];
        assert_eq!(
            text(|b| write_compare_csv(b, &rows)),
            "agent,seed,final_avg_reward,final_regret,first_match_step\nqgreedyucb,4,-7.5,12.25,never\n"
        );
        let p = QueueParams::new(3, 3, 3, 0.4, 1.0);
        let s = text(|b| write_qtable_csv(b, &QTables::new(&p, true)));
        assert_eq!(s, "state,action,Q,Qhat,N\n0,0,0,0,0\n1,1,0,0,0\n2,2,0,0,0\n3,3,0,0,0\n");
    }

    #[test]
    fn summary_and_alpha_sweep_schemas() {
        use crate::sim::{alpha_sweep, multi_seed_compare};
        let p = QueueParams::new(6, 3, 3, 0.5, 1.0);
        let cfg = LearnerConfig::default();
        let rep = multi_seed_compare(&p, &[AgentKind::Arl], &cfg, 10, &[1, 2], &RecordSchedule::default()).unwrap();
        let s = text(|b| write_summary_csv(b, &rep.summaries));
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("agent,runs,avg_reward_mean"));
        assert!(lines[1].starts_with("arl,2,"));

        let sw = alpha_sweep(&p, &[0.5], AgentKind::QLearning, &cfg, 1, &[3], &RecordSchedule::default()).unwrap();
        let s = text(|b| write_alpha_sweep_csv(b, &sw));
        let row = s.lines().nth(1).unwrap();
        // one step from an empty queue leaves every row flat, so states with
        // several feasible actions list them all
        assert!(row.starts_with("0.5,3,"), "{row}");
        assert!(row.contains(",0;0|1;0|1|2;"), "{row}");
        assert!(row.ends_with(",0,false"), "{row}");
    }
}
