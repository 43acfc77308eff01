//! Delay-power scheduling for a single batch-arrival queue.
//!
//! A server drains up to `C` packets per slot from a buffer of size `B`;
//! each slot a batch of `M` packets arrives with probability `alpha`. The
//! per-slot reward `-(q/(alpha·M) + lambda·c²)` trades queueing delay
//! against transmit power. This crate provides the MDP ([`mdp`]), exact
//! average-reward solvers ([`solver`]), tabular learners including
//! Q-greedyUCB ([`learners`]), a seeded simulation harness ([`sim`]) and
//! CSV export ([`export`]).

pub mod error;
pub mod export;
pub mod learners;
pub mod mdp;
pub mod rng;
pub mod sim;
pub mod solver;
pub mod table;

pub use error::{Error, ParamViolation, Result};
pub use learners::{extract_policy, make_agent, Agent, AgentKind, LearnerConfig, QTables, StochasticPolicy};
pub use mdp::{build_transition_model, Action, ActionSet, ArrivalFlag, QueueParams, State, TransitionModel};
pub use sim::{run_experiment, RecordSchedule, RunMetrics, RunOptions};
pub use solver::{evaluate_policy, solve_exact, DeterministicPolicy, PolicyEval, SolveResult};
pub use table::StateActionTable;
