use crate::mdp::{Action, ActionSet, QueueParams, State};

/// Dense `[state][action]` table of reals that only exposes feasible cells.
///
/// Infeasible cells exist in storage but are never read by maxima, argmax or
/// norms, so no sentinel arithmetic leaks into results.
#[derive(Debug, Clone, PartialEq)]
pub struct StateActionTable {
    num_actions: usize,
    feasible: Vec<ActionSet>,
    data: Vec<f64>,
}

impl StateActionTable {
    pub fn filled(feasible: Vec<ActionSet>, num_actions: usize, value: f64) -> Self {
        let data = vec![value; feasible.len() * num_actions];
        Self { num_actions, feasible, data }
    }

    pub fn zeros_for(p: &QueueParams) -> Self {
        let feasible = p.states().map(|s| crate::mdp::feasible_actions(p, s)).collect();
        Self::filled(feasible, p.num_actions(), 0.0)
    }

    /// Builds a table by evaluating `f` on every feasible cell.
    pub fn from_fn(feasible: Vec<ActionSet>, num_actions: usize, mut f: impl FnMut(State, Action) -> f64) -> Self {
        let mut t = Self::filled(feasible, num_actions, 0.0);
        for s in 0..t.num_states() {
            for a in t.feasible[s].iter() {
                t.data[s * num_actions + a.0] = f(State(s), a);
            }
        }
        t
    }

    pub fn num_states(&self) -> usize {
        self.feasible.len()
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn feasible(&self, s: State) -> ActionSet {
        self.feasible[s.0]
    }

    pub fn feasible_sets(&self) -> &[ActionSet] {
        &self.feasible
    }

    #[inline]
    pub fn get(&self, s: State, a: Action) -> f64 {
        debug_assert!(self.feasible[s.0].contains(a));
        self.data[s.0 * self.num_actions + a.0]
    }

    #[inline]
    pub fn set(&mut self, s: State, a: Action, v: f64) {
        debug_assert!(self.feasible[s.0].contains(a));
        self.data[s.0 * self.num_actions + a.0] = v;
    }

    /// Values of the feasible actions in `s`, in action order.
    #[inline]
    pub fn row(&self, s: State) -> &[f64] {
        let set = self.feasible[s.0];
        let base = s.0 * self.num_actions;
        &self.data[base + set.min().0..=base + set.max().0]
    }

    #[inline]
    pub fn row_max(&self, s: State) -> f64 {
        self.row(s).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// All feasible actions attaining the row maximum exactly.
    pub fn argmax_set(&self, s: State) -> Vec<Action> {
        let set = self.feasible[s.0];
        let row = self.row(s);
        let best = self.row_max(s);
        row.iter()
            .enumerate()
            .filter(|&(_, &v)| v == best)
            .map(|(i, _)| set.nth(i))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (State, Action, f64)> + '_ {
        (0..self.num_states()).flat_map(move |s| {
            self.feasible[s].iter().map(move |a| (State(s), a, self.data[s * self.num_actions + a.0]))
        })
    }

    /// Sup-norm distance over feasible cells.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        assert_eq!(self.feasible, other.feasible, "tables over different feasible sets");
        self.iter()
            .map(|(s, a, v)| (v - other.get(s, a)).abs())
            .fold(0.0, f64::max)
    }

    /// Adds `r` to every feasible cell.
    pub fn shifted(&self, r: f64) -> Self {
        let mut t = self.clone();
        for s in 0..t.num_states() {
            for a in t.feasible[s].iter() {
                t.data[s * t.num_actions + a.0] += r;
            }
        }
        t
    }
}
