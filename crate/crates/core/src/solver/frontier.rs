use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mdp::TransitionModel;

use super::{evaluate_policy, DeterministicPolicy};

/// A policy's position in the delay-power plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffPoint {
    pub delay: f64,
    pub power: f64,
    /// Index into the policy list the point was computed from.
    pub policy_id: usize,
}

/// Time-sharing between at most two frontier policies.
#[derive(Debug, Clone, PartialEq)]
pub struct Mixture {
    /// `(policy_id, weight)` pairs; weights sum to 1.
    pub weights: Vec<(usize, f64)>,
    pub delay: f64,
    pub power: f64,
}

/// Evaluates each policy; `policy_id` is the position in `policies`.
pub fn tradeoff_points(model: &TransitionModel, policies: &[DeterministicPolicy]) -> Result<Vec<TradeoffPoint>> {
    policies
        .par_iter()
        .enumerate()
        .map(|(id, pi)| {
            let e = evaluate_policy(model, pi)?;
            Ok(TradeoffPoint { delay: e.delay, power: e.power, policy_id: id })
        })
        .collect()
}

fn cross(o: &TradeoffPoint, a: &TradeoffPoint, b: &TradeoffPoint) -> f64 {
    (a.delay - o.delay) * (b.power - o.power) - (a.power - o.power) * (b.delay - o.delay)
}

fn collinear_eps(o: &TradeoffPoint, a: &TradeoffPoint, b: &TradeoffPoint) -> f64 {
    let na = (a.delay - o.delay).hypot(a.power - o.power);
    let nb = (b.delay - o.delay).hypot(b.power - o.power);
    1e-12 * na * nb
}

/// Lower-left convex frontier of a point cloud.
///
/// Vertices come back sorted by increasing delay with strictly decreasing
/// power. Collinear interior points are dropped; among identical points the
/// smallest `policy_id` is kept.
pub fn tradeoff_frontier(points: &[TradeoffPoint]) -> Vec<TradeoffPoint> {
    let mut pts = points.to_vec();
    pts.sort_by(|x, y| {
        x.delay
            .total_cmp(&y.delay)
            .then(x.power.total_cmp(&y.power))
            .then(x.policy_id.cmp(&y.policy_id))
    });
    pts.dedup_by(|later, earlier| later.delay == earlier.delay && later.power == earlier.power);

    let mut hull: Vec<TradeoffPoint> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (o, a) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            if cross(o, a, &p) <= collinear_eps(o, a, &p) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // keep the decreasing branch: up to the first vertex of minimum power
    if let Some(min_idx) = hull
        .iter()
        .enumerate()
        .min_by(|(i, x), (j, y)| x.power.total_cmp(&y.power).then(i.cmp(j)))
        .map(|(i, _)| i)
    {
        hull.truncate(min_idx + 1);
    }
    hull
}

/// Vertical distance `E - f(D)` from a point to the frontier curve, or `None`
/// when `delay` lies left of the frontier's first vertex.
pub fn frontier_gap(frontier: &[TradeoffPoint], delay: f64, power: f64) -> Option<f64> {
    let first = frontier.first()?;
    if delay < first.delay - 1e-12 * (1.0 + first.delay.abs()) {
        return None;
    }
    for w in frontier.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if delay <= b.delay {
            let t = ((delay - a.delay) / (b.delay - a.delay)).max(0.0);
            return Some(power - (a.power + t * (b.power - a.power)));
        }
    }
    Some(power - frontier.last()?.power)
}

/// Minimum-delay mixture of frontier policies meeting an average power budget.
///
/// With the budget strictly between two adjacent vertices the result
/// time-shares them so the power constraint is tight.
pub fn constraint_solve(frontier: &[TradeoffPoint], power_budget: f64) -> Result<Mixture> {
    let first = frontier.first().ok_or_else(|| Error::Invalid("empty frontier".into()))?;
    let last = frontier.last().expect("non-empty");
    if power_budget >= first.power {
        return Ok(Mixture { weights: vec![(first.policy_id, 1.0)], delay: first.delay, power: first.power });
    }
    if power_budget < last.power {
        return Err(Error::InfeasibleBudget { budget: power_budget, min_power: last.power });
    }
    for w in frontier.windows(2) {
        let (hi, lo) = (&w[0], &w[1]);
        if power_budget == lo.power {
            return Ok(Mixture { weights: vec![(lo.policy_id, 1.0)], delay: lo.delay, power: lo.power });
        }
        if power_budget > lo.power && power_budget < hi.power {
            let wt = (power_budget - lo.power) / (hi.power - lo.power);
            return Ok(Mixture {
                weights: vec![(hi.policy_id, wt), (lo.policy_id, 1.0 - wt)],
                delay: wt * hi.delay + (1.0 - wt) * lo.delay,
                power: power_budget,
            });
        }
    }
    unreachable!("budget {power_budget} not bracketed by a strictly decreasing frontier")
}
