//! Seeded queue simulation and training runs.
//!
//! A run seed drives two independent generators: arrivals on the environment
//! stream and agent randomness on the agent stream (see [`crate::rng`]).
//! Regret at slot `t` is `t·g* - Σ r_u`, the shortfall against the optimal
//! gain, and is never clamped.

mod compare;
mod env;
mod experiment;

pub use compare::{alpha_sweep, multi_seed_compare, AgentSummary, AlphaPoint, AlphaSweep, CompareReport, CompareRow, Spread};
pub use env::{env_step, EnvState, StepOutcome};
pub use experiment::{regret_series, run_agent, run_experiment, MetricPoint, RecordSchedule, RunMetrics, RunOptions};
