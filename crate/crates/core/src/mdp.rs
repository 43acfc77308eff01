//! The single-queue, single-server scheduling MDP.
//!
//! Time is slotted. In every slot the transmitter picks how many packets `c`
//! to send out of the `q` currently buffered, then a batch of `M` packets
//! arrives with probability `alpha`:
//!
//! ```text
//! q' = min(q - c + M·tau, B)          tau ~ Bernoulli(alpha)
//! R(q, c) = -(q / (alpha·M) + lambda·c²)
//! ```
//!
//! Feasible actions keep the buffer from under- or overflowing:
//! `max(0, q - B + M) <= c <= min(q, C)`. When `q > B - M + C` that range is
//! empty even though such states are reachable (e.g. `B = 10, M = 5, C = 4`
//! reaches `q = 10`). Those states fall back to `{C}` and the next state is
//! clamped at `B`, with the overflow reported as dropped packets.

use std::fmt;

use crate::error::{Error, ParamViolation, Result};

/// Environment constants and the Lagrange trade-off weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueParams {
    /// Maximum buffer size `B` in packets.
    pub buffer_size: usize,
    /// Packets per arrival `M`.
    pub arrival_batch: usize,
    /// Maximum packets transmitted per slot `C`.
    pub max_service: usize,
    /// Bernoulli arrival probability.
    pub alpha: f64,
    /// Lagrange multiplier weighting power against delay.
    pub lambda: f64,
}

impl QueueParams {
    pub fn new(buffer_size: usize, arrival_batch: usize, max_service: usize, alpha: f64, lambda: f64) -> Self {
        Self { buffer_size, arrival_batch, max_service, alpha, lambda }
    }

    /// Number of states `S = B + 1`.
    pub fn num_states(&self) -> usize {
        self.buffer_size + 1
    }

    /// Size of the full action alphabet `A = C + 1`.
    pub fn num_actions(&self) -> usize {
        self.max_service + 1
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn states(&self) -> impl Iterator<Item = State> {
        (0..self.num_states()).map(State)
    }

    /// Checks every invariant and returns the full list of violations.
    pub fn validate(&self) -> std::result::Result<(), Vec<ParamViolation>> {
        let mut errs = Vec::new();
        if self.arrival_batch == 0 {
            errs.push(ParamViolation::BatchZero);
        }
        if self.max_service == 0 {
            errs.push(ParamViolation::MaxServiceZero);
        }
        if self.buffer_size <= self.arrival_batch {
            errs.push(ParamViolation::BufferNotAboveBatch {
                buffer: self.buffer_size,
                batch: self.arrival_batch,
            });
        }
        // written so that NaN fails too
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            errs.push(ParamViolation::AlphaOutOfRange(self.alpha));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            errs.push(ParamViolation::LambdaNegative(self.lambda));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    /// Like [`validate`](Self::validate), but accepts the degenerate `B = M`
    /// boundary. Such a queue is still a well-defined chain (every action is
    /// forced below `C`), which the model builders and simulator allow.
    pub fn validate_structure(&self) -> std::result::Result<(), Vec<ParamViolation>> {
        let errs: Vec<ParamViolation> = match self.validate() {
            Ok(()) => return Ok(()),
            Err(errs) => errs
                .into_iter()
                .filter(|e| !matches!(e, ParamViolation::BufferNotAboveBatch { buffer, batch } if buffer == batch))
                .collect(),
        };
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        self.validate_structure().map_err(Error::InvalidParams)
    }
}

/// Queue length in packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub usize);

/// Packets transmitted in a slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Action(pub usize);

/// Whether a batch arrived in the current slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrivalFlag(pub bool);

impl State {
    pub fn index(self) -> usize {
        self.0
    }
}

impl Action {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q={}", self.0)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c={}", self.0)
    }
}

/// Contiguous range of feasible actions in one state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionSet {
    lo: usize,
    hi: usize,
    fallback: bool,
}

impl ActionSet {
    /// The inclusive range `lo..=hi`.
    pub fn range(lo: usize, hi: usize) -> Self {
        assert!(lo <= hi, "empty action range {lo}..={hi}");
        Self { lo, hi, fallback: false }
    }

    pub fn min(&self) -> Action {
        Action(self.lo)
    }

    pub fn max(&self) -> Action {
        Action(self.hi)
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// True when the buffer constraints admit no action and `{C}` was substituted.
    pub fn is_fallback(&self) -> bool {
        self.fallback
    }

    pub fn contains(&self, a: Action) -> bool {
        (self.lo..=self.hi).contains(&a.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Action> + Clone {
        (self.lo..=self.hi).map(Action)
    }

    /// The `i`-th action in increasing order.
    pub fn nth(&self, i: usize) -> Action {
        debug_assert!(i < self.len());
        Action(self.lo + i)
    }
}

/// Outcome of applying the queue recursion once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transition {
    pub next: State,
    pub dropped: usize,
}

pub fn feasible_actions(p: &QueueParams, s: State) -> ActionSet {
    let q = s.0;
    let lo = (q + p.arrival_batch).saturating_sub(p.buffer_size);
    let hi = q.min(p.max_service);
    if lo <= hi {
        ActionSet { lo, hi, fallback: false }
    } else {
        ActionSet { lo: p.max_service, hi: p.max_service, fallback: true }
    }
}

fn check_feasible(p: &QueueParams, s: State, a: Action) -> Result<()> {
    if s.0 <= p.buffer_size && feasible_actions(p, s).contains(a) {
        Ok(())
    } else {
        Err(Error::InfeasibleAction { state: s, action: a })
    }
}

pub fn next_state(p: &QueueParams, s: State, a: Action, tau: ArrivalFlag) -> Result<Transition> {
    check_feasible(p, s, a)?;
    Ok(apply(p, s.0, a.0, tau.0))
}

#[inline]
pub(crate) fn apply(p: &QueueParams, q: usize, c: usize, arrived: bool) -> Transition {
    let raw = q - c + if arrived { p.arrival_batch } else { 0 };
    if raw > p.buffer_size {
        Transition { next: State(p.buffer_size), dropped: raw - p.buffer_size }
    } else {
        Transition { next: State(raw), dropped: 0 }
    }
}

/// Next-state distribution, sorted by state, with coincident outcomes merged.
pub fn transition_distribution(p: &QueueParams, s: State, a: Action) -> Result<Vec<(State, f64)>> {
    check_feasible(p, s, a)?;
    let stay = apply(p, s.0, a.0, false).next;
    let arrive = apply(p, s.0, a.0, true).next;
    Ok(if stay == arrive {
        vec![(stay, 1.0)]
    } else {
        let mut v = vec![(stay, 1.0 - p.alpha), (arrive, p.alpha)];
        v.sort_by_key(|&(s, _)| s);
        v
    })
}

/// Per-slot delay from Little's law, `q / (alpha·M)`, in slots.
#[inline]
pub fn delay(p: &QueueParams, q: usize) -> f64 {
    q as f64 / (p.alpha * p.arrival_batch as f64)
}

/// Transmit power for sending `c` packets in one slot.
#[inline]
pub fn power(c: usize) -> f64 {
    let c = c as f64;
    c * c
}

#[inline]
pub(crate) fn reward_unchecked(p: &QueueParams, q: usize, c: usize) -> f64 {
    -(delay(p, q) + p.lambda * power(c))
}

pub fn immediate_reward(p: &QueueParams, s: State, a: Action) -> Result<f64> {
    check_feasible(p, s, a)?;
    Ok(reward_unchecked(p, s.0, a.0))
}

/// Dense kernel and reward tables for exact computations.
///
/// Cells for infeasible `(s, a)` pairs are never populated; use
/// [`TransitionModel::feasible`] to iterate.
#[derive(Debug, Clone)]
pub struct TransitionModel {
    params: QueueParams,
    feasible: Vec<ActionSet>,
    kernel: Vec<f64>,
    rewards: Vec<f64>,
}

impl TransitionModel {
    pub fn build(p: &QueueParams) -> Result<Self> {
        p.ensure_valid()?;
        let ns = p.num_states();
        let na = p.num_actions();
        let feasible: Vec<_> = p.states().map(|s| feasible_actions(p, s)).collect();
        let mut kernel = vec![0.0; ns * na * ns];
        let mut rewards = vec![f64::NAN; ns * na];
        for s in p.states() {
            for a in feasible[s.0].iter() {
                for (next, prob) in transition_distribution(p, s, a)? {
                    kernel[(s.0 * na + a.0) * ns + next.0] += prob;
                }
                rewards[s.0 * na + a.0] = reward_unchecked(p, s.0, a.0);
            }
        }
        Ok(Self { params: *p, feasible, kernel, rewards })
    }

    pub fn params(&self) -> &QueueParams {
        &self.params
    }

    pub fn num_states(&self) -> usize {
        self.params.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.params.num_actions()
    }

    pub fn feasible(&self, s: State) -> ActionSet {
        self.feasible[s.0]
    }

    pub fn feasible_sets(&self) -> &[ActionSet] {
        &self.feasible
    }

    /// Row `P(· | s, a)` over all next states; `None` if `a` is infeasible in `s`.
    pub fn row(&self, s: State, a: Action) -> Option<&[f64]> {
        if !self.feasible(s).contains(a) {
            return None;
        }
        let ns = self.num_states();
        let start = (s.0 * self.num_actions() + a.0) * ns;
        Some(&self.kernel[start..start + ns])
    }

    pub fn reward(&self, s: State, a: Action) -> Option<f64> {
        self.feasible(s).contains(a).then(|| self.rewards[s.0 * self.num_actions() + a.0])
    }

    // Feasibility is the caller's responsibility.
    #[inline]
    pub(crate) fn row_unchecked(&self, s: usize, a: usize) -> &[f64] {
        let ns = self.num_states();
        let start = (s * self.num_actions() + a) * ns;
        &self.kernel[start..start + ns]
    }

    #[inline]
    pub(crate) fn reward_at(&self, s: usize, a: usize) -> f64 {
        self.rewards[s * self.num_actions() + a]
    }
}

pub fn build_transition_model(p: &QueueParams) -> Result<TransitionModel> {
    TransitionModel::build(p)
}
