use crate::mdp::{feasible_actions, Action, ActionSet, QueueParams};

use super::DeterministicPolicy;

/// Number of monotone (threshold-type) feasible policies, without building them.
pub fn count_monotone_policies(p: &QueueParams) -> u128 {
    let sets: Vec<ActionSet> = p.states().map(|s| feasible_actions(p, s)).collect();
    // ways[c] = number of valid prefixes ending with action c
    let mut ways = vec![0u128; p.num_actions()];
    for a in sets[0].iter() {
        ways[a.0] = 1;
    }
    for set in &sets[1..] {
        let mut next = vec![0u128; ways.len()];
        let mut running = 0u128;
        for c in 0..ways.len() {
            running = running.saturating_add(ways[c]);
            if set.contains(Action(c)) {
                next[c] = running;
            }
        }
        ways = next;
    }
    ways.iter().fold(0u128, |acc, &w| acc.saturating_add(w))
}

/// Every feasible policy with actions nondecreasing in queue length, in
/// lexicographic order of the action vector.
pub fn enumerate_monotone_policies(p: &QueueParams) -> Vec<DeterministicPolicy> {
    let sets: Vec<ActionSet> = p.states().map(|s| feasible_actions(p, s)).collect();
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(sets.len());
    extend(&sets, &mut prefix, &mut out);
    out
}

fn extend(sets: &[ActionSet], prefix: &mut Vec<Action>, out: &mut Vec<DeterministicPolicy>) {
    let depth = prefix.len();
    if depth == sets.len() {
        out.push(DeterministicPolicy::new_unchecked(prefix.clone()));
        return;
    }
    let floor = prefix.last().copied().unwrap_or(Action(0));
    for a in sets[depth].iter().filter(|&a| a >= floor) {
        prefix.push(a);
        extend(sets, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::State;

    /// Exhaustive product of all feasible sets, filtered to monotone vectors.
    fn brute_force(p: &QueueParams) -> Vec<Vec<usize>> {
        let sets: Vec<Vec<usize>> =
            p.states().map(|s| feasible_actions(p, s).iter().map(|a| a.0).collect()).collect();
        let mut all = vec![vec![]];
        for set in &sets {
            all = all
                .into_iter()
                .flat_map(|v: Vec<usize>| {
                    set.iter().map(move |&c| {
                        let mut w = v.clone();
                        w.push(c);
                        w
                    })
                })
                .collect();
        }
        all.retain(|v| v.windows(2).all(|w| w[0] <= w[1]));
        all.sort();
        all
    }

    fn as_indices(v: &[DeterministicPolicy]) -> Vec<Vec<usize>> {
        v.iter().map(|pi| pi.actions().iter().map(|a| a.0).collect()).collect()
    }

    #[test]
    fn small_instance_has_forty_policies() {
        let p = QueueParams::new(6, 3, 3, 0.5, 1.0);
        let sets: Vec<_> = p.states().map(|s| feasible_actions(&p, s)).collect();
        let bounds: Vec<_> = sets.iter().map(|s| (s.min().0, s.max().0)).collect();
        assert_eq!(bounds, vec![(0, 0), (0, 1), (0, 2), (0, 3), (1, 3), (2, 3), (3, 3)]);
        let pols = enumerate_monotone_policies(&p);
        assert_eq!(pols.len(), 40);
        assert_eq!(count_monotone_policies(&p), 40);
        assert_eq!(as_indices(&pols), brute_force(&p));
    }

    #[test]
    fn forced_instance_has_one_policy() {
        let p = QueueParams::new(3, 3, 3, 0.4, 1.0);
        let pols = enumerate_monotone_policies(&p);
        assert_eq!(as_indices(&pols), vec![vec![0, 1, 2, 3]]);
        assert_eq!(count_monotone_policies(&p), 1);
    }

    #[test]
    fn matches_brute_force_on_reference_shapes() {
        for (b, m, c) in [(10, 5, 4), (8, 3, 2), (7, 2, 5)] {
            let p = QueueParams::new(b, m, c, 0.4, 1.0);
            let pols = enumerate_monotone_policies(&p);
            assert_eq!(as_indices(&pols), brute_force(&p));
            assert_eq!(count_monotone_policies(&p), pols.len() as u128);
            for pi in &pols {
                assert!(pi.is_monotone());
                for q in 0..pi.len() {
                    for q2 in q..pi.len() {
                        assert!(pi.action(State(q)) <= pi.action(State(q2)));
                    }
                }
            }
        }
    }
}
