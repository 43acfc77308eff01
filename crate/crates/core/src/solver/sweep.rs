use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mdp::{build_transition_model, QueueParams};

use super::{evaluate_policy, solve_exact, PolicyEval, SolveResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub lambda: f64,
    pub solve: SolveResult,
    pub eval: PolicyEval,
}

/// Solves the Lagrangian problem once per multiplier.
///
/// `base.lambda` is ignored. Results come back in input order; a failure at
/// one grid point does not stop the others.
pub fn sweep_lambda(base: &QueueParams, lambdas: &[f64]) -> Vec<Result<SweepPoint>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            if lambda.is_nan() || lambda < 0.0 {
                return Err(Error::Invalid(format!("lambda must be non-negative, got {lambda}")));
            }
            let model = build_transition_model(&base.with_lambda(lambda))?;
            let solve = solve_exact(&model)?;
            let eval = evaluate_policy(&model, &solve.policy)?;
            Ok(SweepPoint { lambda, solve, eval })
        })
        .collect()
}
