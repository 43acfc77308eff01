use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mdp::{delay, power, State, TransitionModel};

use super::DeterministicPolicy;

/// Long-run behaviour of a deterministic policy started from an empty queue.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyEval {
    pub stationary: Vec<f64>,
    /// Average delay `D` in slots.
    pub delay: f64,
    /// Average power `E` per slot.
    pub power: f64,
    /// Average reward `-(D + lambda·E)`.
    pub gain: f64,
}

/// Row-stochastic matrix of the chain induced by `pi`.
pub fn policy_chain(model: &TransitionModel, pi: &DeterministicPolicy) -> Result<DMatrix<f64>> {
    let ns = model.num_states();
    if pi.len() != ns {
        return Err(Error::PolicyLength { expected: ns, got: pi.len() });
    }
    let mut m = DMatrix::zeros(ns, ns);
    for s in 0..ns {
        let a = pi.action(State(s));
        let row = model.row(State(s), a).ok_or(Error::InfeasibleAction { state: State(s), action: a })?;
        for (j, &p) in row.iter().enumerate() {
            m[(s, j)] = p;
        }
    }
    Ok(m)
}

/// Stationary distribution of the chain's long-run behaviour from state 0.
///
/// The balance equations are solved on the set of states reachable from 0;
/// everything else gets probability zero. A reachable set holding more than
/// one closed class has no unique answer and is reported as singular.
pub fn stationary_distribution(chain: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = chain.nrows();
    if n == 0 || chain.ncols() != n {
        return Err(Error::Invalid("chain must be a non-empty square matrix".into()));
    }

    let mut reachable = vec![false; n];
    let mut stack = vec![0];
    reachable[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if chain[(i, j)] > 0.0 && !reachable[j] {
                reachable[j] = true;
                stack.push(j);
            }
        }
    }
    let idx: Vec<usize> = (0..n).filter(|&i| reachable[i]).collect();
    let k = idx.len();

    // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1
    let mut a = DMatrix::zeros(k, k);
    for (r, &i) in idx.iter().enumerate() {
        for (c, &j) in idx.iter().enumerate() {
            a[(r, c)] = chain[(j, i)] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for c in 0..k {
        a[(k - 1, c)] = 1.0;
    }
    let mut b = DVector::zeros(k);
    b[k - 1] = 1.0;
    let sol = a.lu().solve(&b).ok_or(Error::Singular)?;

    let mut pi = vec![0.0; n];
    for (r, &i) in idx.iter().enumerate() {
        pi[i] = sol[r];
    }
    if pi.iter().any(|&x| !x.is_finite() || x < -1e-9) {
        return Err(Error::Singular);
    }
    // balance residual catches near-singular solves that LU let through
    for j in 0..n {
        let flow: f64 = (0..n).map(|i| pi[i] * chain[(i, j)]).sum();
        if (flow - pi[j]).abs() > 1e-8 {
            return Err(Error::Singular);
        }
    }
    for x in &mut pi {
        *x = x.max(0.0);
    }
    let total: f64 = pi.iter().sum();
    for x in &mut pi {
        *x /= total;
    }
    Ok(pi)
}

pub fn evaluate_policy(model: &TransitionModel, pi: &DeterministicPolicy) -> Result<PolicyEval> {
    let p = model.params();
    let stationary = stationary_distribution(&policy_chain(model, pi)?)?;
    let mut d = 0.0;
    let mut e = 0.0;
    for (q, &w) in stationary.iter().enumerate() {
        d += w * delay(p, q);
        e += w * power(pi.action(State(q)).0);
    }
    Ok(PolicyEval { stationary, delay: d, power: e, gain: -(d + p.lambda * e) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{build_transition_model, QueueParams};

    fn forced(alpha: f64) -> (TransitionModel, DeterministicPolicy) {
        let p = QueueParams::new(3, 3, 3, alpha, 1.0);
        let m = build_transition_model(&p).unwrap();
        let pi = DeterministicPolicy::from_indices(&p, &[0, 1, 2, 3]).unwrap();
        (m, pi)
    }

    #[test]
    fn forced_chain_rows() {
        let (m, pi) = forced(0.4);
        let c = policy_chain(&m, &pi).unwrap();
        assert_eq!((c[(0, 0)], c[(0, 3)]), (0.6, 0.4));
        assert_eq!((c[(3, 0)], c[(3, 3)]), (0.6, 0.4));
        // unreachable states still have well-formed rows
        for s in 0..4 {
            let sum: f64 = c.row(s).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forced_chain_matches_simulated_frequencies() {
        use rand::{Rng, SeedableRng};
        let (m, pi) = forced(0.4);
        let c = policy_chain(&m, &pi).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut counts = [[0u32; 4]; 4];
        let mut q = 0usize;
        for _ in 0..200_000 {
            let next = q - pi.action(State(q)).0 + if rng.random_bool(0.4) { 3 } else { 0 };
            counts[q][next] += 1;
            q = next;
        }
        for s in [0, 3] {
            let tot: u32 = counts[s].iter().sum();
            for j in 0..4 {
                let freq = counts[s][j] as f64 / tot as f64;
                assert!((freq - c[(s, j)]).abs() < 0.01);
            }
        }
    }

    #[test]
    fn two_state_stationary() {
        let (m, pi) = forced(0.4);
        let st = stationary_distribution(&policy_chain(&m, &pi).unwrap()).unwrap();
        let want = [0.6, 0.0, 0.0, 0.4];
        for (a, b) in st.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_chain_is_point_mass() {
        let st = stationary_distribution(&DMatrix::identity(4, 4)).unwrap();
        assert_eq!(st, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_closed_classes_are_singular() {
        let mut c = DMatrix::zeros(3, 3);
        c[(0, 1)] = 0.5;
        c[(0, 2)] = 0.5;
        c[(1, 1)] = 1.0;
        c[(2, 2)] = 1.0;
        assert!(matches!(stationary_distribution(&c), Err(Error::Singular)));
    }

    #[test]
    fn forced_policy_eval_closed_form() {
        for alpha in [0.4, 0.1, 0.01] {
            let (m, pi) = forced(alpha);
            let e = evaluate_policy(&m, &pi).unwrap();
            // D = E[q]/(alpha M) = 3 alpha / (3 alpha) = 1, E = 9 alpha
            assert!((e.delay - 1.0).abs() < 1e-12);
            assert!((e.power - 9.0 * alpha).abs() < 1e-12);
            assert!((e.gain - -(1.0 + 9.0 * alpha)).abs() < 1e-12);
            assert!((e.stationary.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }
}
